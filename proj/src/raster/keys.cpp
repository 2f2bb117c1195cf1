// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "lfr/error.hpp"
#include "lfr/raster.hpp"

namespace lfr::raster {

namespace {

// The blend evaluates q in single precision; widen the cutoff a little so a
// tile is never dropped when rounding lets a boundary sample reach 1/255.
constexpr double kCutoffSlackRel = 1e-3;
constexpr double kCutoffSlackAbs = 1e-3;

// Minimum of a*x^2 + 2b*x*y + c*y^2 over x in [x0, x1], y in [y0, y1], for a
// positive-definite form.
double rect_min_q(double a, double b, double c, double x0, double x1, double y0, double y1) {
  if (x0 <= 0.0 && 0.0 <= x1 && y0 <= 0.0 && 0.0 <= y1) return 0.0;
  auto q = [&](double x, double y) { return a * x * x + 2.0 * b * x * y + c * y * y; };
  double best = std::numeric_limits<double>::infinity();
  for (const double x : {x0, x1}) best = std::min(best, q(x, std::clamp(-b * x / c, y0, y1)));
  for (const double y : {y0, y1}) best = std::min(best, q(std::clamp(-b * y / a, x0, x1), y));
  return best;
}

void check_tile_bits(const display::DisplayConfig& config, int bits_k) {
  const std::uint64_t limit = std::uint64_t{1} << (32 - bits_k);
  if (static_cast<std::uint64_t>(config.num_tiles()) > limit) {
    throw Error(ErrorCode::kTileIdOverflow,
                std::to_string(config.num_tiles()) + " tiles do not fit in " +
                    std::to_string(32 - bits_k) + " key bits");
  }
}

void check_buffers(const ProjectionBuffers& buffers, const camera::Clustering& clustering) {
  if (buffers.num_views != clustering.num_views() ||
      buffers.num_clusters != clustering.num_clusters()) {
    throw Error(ErrorCode::kInconsistentInputs, "projection buffers do not match the clustering");
  }
}

}  // namespace

int cluster_bits(int num_clusters) {
  const auto k = static_cast<std::uint32_t>(std::max(num_clusters, 2));
  return std::bit_width(k - 1);
}

std::uint64_t pack_key(std::uint32_t tile, std::uint32_t cluster, float depth, int bits_k) {
  return (static_cast<std::uint64_t>(tile) << (32 + bits_k)) |
         (static_cast<std::uint64_t>(cluster) << 32) | std::bit_cast<std::uint32_t>(depth);
}

std::uint32_t key_tile(std::uint64_t key, int bits_k) {
  return static_cast<std::uint32_t>(key >> (32 + bits_k));
}

std::uint32_t key_cluster(std::uint64_t key, int bits_k) {
  return static_cast<std::uint32_t>((key >> 32) & ((std::uint64_t{1} << bits_k) - 1));
}

float key_depth(std::uint64_t key) {
  return std::bit_cast<float>(static_cast<std::uint32_t>(key));
}

void overlapped_tiles(const Eigen::Vector2f& mean, const SplatRecord& splat,
                      const SplatExtent& extent, const display::DisplayConfig& config,
                      float margin_px, std::vector<std::uint32_t>& out) {
  if (!(extent.cutoff_q > 0.0f)) return;
  const double cutoff = extent.cutoff_q * (1.0 + kCutoffSlackRel) + kCutoffSlackAbs;
  const double m = margin_px;
  const double mx = mean.x(), my = mean.y();
  const double hx = std::sqrt(extent.cov_xx * cutoff) + m;
  const double hy = std::sqrt(extent.cov_yy * cutoff) + m;

  // Pixels whose centers (x + 0.5) fall inside the bounding box.
  const double fx0 = std::ceil(mx - hx - 0.5), fx1 = std::floor(mx + hx - 0.5);
  const double fy0 = std::ceil(my - hy - 0.5), fy1 = std::floor(my + hy - 0.5);
  if (!(fx0 <= fx1 && fy0 <= fy1)) return;
  if (fx1 < 0.0 || fy1 < 0.0 || fx0 > config.width - 1 || fy0 > config.height - 1) return;
  const int ts = config.tile_size;
  const int tx0 = static_cast<int>(std::max(fx0, 0.0)) / ts;
  const int tx1 = static_cast<int>(std::min(fx1, config.width - 1.0)) / ts;
  const int ty0 = static_cast<int>(std::max(fy0, 0.0)) / ts;
  const int ty1 = static_cast<int>(std::min(fy1, config.height - 1.0)) / ts;

  const double a = splat.conic_a, b = splat.conic_b, c = splat.conic_c;
  const int tiles_x = config.tiles_x();
  for (int ty = ty0; ty <= ty1; ++ty) {
    const double y0 = ty * ts + 0.5 - m - my;
    const double y1 = std::min((ty + 1) * ts, config.height) - 0.5 + m - my;
    for (int tx = tx0; tx <= tx1; ++tx) {
      const double x0 = tx * ts + 0.5 - m - mx;
      const double x1 = std::min((tx + 1) * ts, config.width) - 0.5 + m - mx;
      if (rect_min_q(a, b, c, x0, x1, y0, y1) <= cutoff) {
        out.push_back(static_cast<std::uint32_t>(ty * tiles_x + tx));
      }
    }
  }
}

namespace {

// Sorted, duplicate-free union of the tiles reached from every view of
// cluster k.
void cluster_tiles(const ProjectionBuffers& buffers, const camera::Clustering& clustering,
                   const display::DisplayConfig& config, float margin, int i, int k,
                   std::vector<std::uint32_t>& out) {
  out.clear();
  const std::size_t slot = buffers.cluster_slot(i, k);
  if (!buffers.cluster_visible[slot]) return;
  const SplatRecord& splat = buffers.splats[slot];
  const SplatExtent& extent = buffers.extents[slot];
  int reached = 0;
  for (int j = clustering.begin(k); j < clustering.end(k); ++j) {
    const std::size_t v = buffers.view_slot(i, j);
    if (!buffers.view_visible[v]) continue;
    overlapped_tiles(buffers.means2d[v], splat, extent, config, margin, out);
    ++reached;
  }
  if (reached > 1) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
}

}  // namespace

std::vector<KeyedSplat> generate_keys(const ProjectionBuffers& buffers,
                                      const camera::Clustering& clustering,
                                      const display::DisplayConfig& config,
                                      const KeyGenOptions& options) {
  check_buffers(buffers, clustering);
  const int bits_k = cluster_bits(clustering.num_clusters());
  check_tile_bits(config, bits_k);
  const int m = buffers.num_gaussians, k_count = buffers.num_clusters;
  const auto slots = static_cast<std::ptrdiff_t>(m) * k_count;

  // Count, scan, fill: the second pass recomputes the unions instead of
  // holding every per-slot tile list in memory.
  std::vector<std::uint64_t> offsets(slots + 1, 0);
#pragma omp parallel
  {
    std::vector<std::uint32_t> tiles;
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t s = 0; s < slots; ++s) {
      cluster_tiles(buffers, clustering, config, options.tile_margin_px,
                    static_cast<int>(s / k_count), static_cast<int>(s % k_count), tiles);
      offsets[s + 1] = tiles.size();
    }
  }
  for (std::ptrdiff_t s = 0; s < slots; ++s) offsets[s + 1] += offsets[s];

  std::vector<KeyedSplat> keys(offsets.back());
#pragma omp parallel
  {
    std::vector<std::uint32_t> tiles;
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t s = 0; s < slots; ++s) {
      if (offsets[s] == offsets[s + 1]) continue;
      const int i = static_cast<int>(s / k_count), k = static_cast<int>(s % k_count);
      cluster_tiles(buffers, clustering, config, options.tile_margin_px, i, k, tiles);
      const float depth = buffers.splats[s].depth;
      KeyedSplat* dst = keys.data() + offsets[s];
      for (const std::uint32_t t : tiles) {
        *dst++ = {pack_key(t, static_cast<std::uint32_t>(k), depth, bits_k),
                  static_cast<std::uint32_t>(i)};
      }
    }
  }
  return keys;
}

std::vector<KeyedSplat> generate_keys_reference(const ProjectionBuffers& buffers,
                                                const camera::Clustering& clustering,
                                                const display::DisplayConfig& config,
                                                const KeyGenOptions& options) {
  check_buffers(buffers, clustering);
  const int bits_k = cluster_bits(clustering.num_clusters());
  check_tile_bits(config, bits_k);
  std::vector<KeyedSplat> keys;
  std::vector<std::uint32_t> tiles;
  for (int i = 0; i < buffers.num_gaussians; ++i) {
    for (int k = 0; k < buffers.num_clusters; ++k) {
      const std::size_t slot = buffers.cluster_slot(i, k);
      if (!buffers.cluster_visible[slot]) continue;
      std::set<std::uint32_t> merged;
      for (const int j : clustering.padded_views(k)) {
        const std::size_t v = buffers.view_slot(i, j);
        if (!buffers.view_visible[v]) continue;
        tiles.clear();
        overlapped_tiles(buffers.means2d[v], buffers.splats[slot], buffers.extents[slot], config,
                         options.tile_margin_px, tiles);
        merged.insert(tiles.begin(), tiles.end());
      }
      for (const std::uint32_t t : merged) {
        keys.push_back({pack_key(t, static_cast<std::uint32_t>(k), buffers.splats[slot].depth,
                                 bits_k),
                        static_cast<std::uint32_t>(i)});
      }
    }
  }
  return keys;
}

}  // namespace lfr::raster
