// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>

#include "lfr/error.hpp"
#include "lfr/raster.hpp"
#include "lfr/splat_math.hpp"

namespace lfr::raster {

namespace {

using splat::kMinAlpha;
using splat::kMinTransmittance;

void check_inputs(const SortedSplats& sorted, const ProjectionBuffers& buffers,
                  const camera::Clustering& clustering, const display::RemapTable& mapping,
                  const display::ViewpointMatrix& matrix) {
  const auto& c = matrix.config();
  auto fail = [](const char* what) { throw Error(ErrorCode::kInconsistentInputs, what); };
  if (!(mapping.config() == c)) fail("thread mapping and viewpoint matrix disagree on the display");
  if (mapping.size() != c.num_subpixels()) fail("thread mapping does not cover the panel");
  if (clustering.num_views() != c.num_views) fail("clustering does not match the display views");
  if (buffers.num_views != clustering.num_views() ||
      buffers.num_clusters != clustering.num_clusters()) {
    fail("projection buffers do not match the clustering");
  }
  if (sorted.ranges.num_tiles() != c.num_tiles() ||
      sorted.ranges.num_clusters() != clustering.num_clusters()) {
    fail("range table does not match the tile grid");
  }
  if (sorted.gaussians.size() != sorted.keys.size()) fail("sorted keys and payload differ in size");
  for (const std::uint32_t i : sorted.gaussians) {
    if (i >= static_cast<std::uint32_t>(buffers.num_gaussians)) fail("payload out of range");
  }
}

// Shared read-only state of one blend call.
struct Frame {
  const SortedSplats& sorted;
  const ProjectionBuffers& buffers;
  const camera::Clustering& clustering;
  const display::ViewpointMatrix& matrix;
  const Rgb& background;
  const float* means;  // interleaved (x, y) per (i, j)
  int num_views;
  int num_clusters;
};

// Blends one packet of up to kPacketLanes ranks of tile t. Lanes are grouped
// by the (tile, cluster) list they read; every group walks its list once with
// all lanes in lockstep, so a packet mixing g clusters pays for g traversals.
void blend_packet(const Frame& f, int t, std::span<const std::uint32_t> ranks, float* out) {
  constexpr int L = kPacketLanes;
  const auto& cfg = f.matrix.config();
  alignas(64) float px[L], py[L], acc[L], trans[L];
  alignas(64) int view[L], chan[L], cluster[L];
  alignas(64) std::uint8_t member[L], running[L];

  const int n = static_cast<int>(ranks.size());
  for (int l = 0; l < L; ++l) {
    if (l < n) {
      const display::Subpixel s = display::subpixel_coord(cfg, ranks[l]);
      px[l] = static_cast<float>(s.x) + 0.5f;
      py[l] = static_cast<float>(s.y) + 0.5f;
      view[l] = f.matrix[ranks[l]];
      chan[l] = s.u;
      cluster[l] = f.clustering.cluster_of(view[l]);
    } else {
      px[l] = py[l] = 0.0f;
      view[l] = chan[l] = 0;
      cluster[l] = -1;
    }
    acc[l] = 0.0f;
    trans[l] = 1.0f;
  }

  std::uint32_t pending = n == L ? ~0u : (1u << n) - 1u;
  while (pending != 0) {
    const int k = cluster[std::countr_zero(pending)];
    for (int l = 0; l < L; ++l) {
      member[l] = cluster[l] == k;
      running[l] = member[l];
      if (member[l]) pending &= ~(1u << l);
    }
    const auto range = f.sorted.ranges.range(t, k);
    for (std::uint32_t e = range.begin; e < range.end; ++e) {
      const std::uint32_t i = f.sorted.gaussians[e];
      const SplatRecord& sp = f.buffers.splats[static_cast<std::size_t>(i) * f.num_clusters + k];
      const float* mean = f.means + static_cast<std::size_t>(i) * f.num_views * 2;
      const std::uint8_t* vis = f.buffers.view_visible.data() +
                                static_cast<std::size_t>(i) * f.num_views;
      const float a = sp.conic_a, b = sp.conic_b, c = sp.conic_c, o = sp.opacity;
      const float c0 = sp.color[0], c1 = sp.color[1], c2 = sp.color[2];
      int live = 0;
#pragma omp simd reduction(+ : live)
      for (int l = 0; l < L; ++l) {
        const float dx = px[l] - mean[2 * view[l]];
        const float dy = py[l] - mean[2 * view[l] + 1];
        const float alpha = splat::alpha_at(o, a, b, c, dx, dy);
        const bool use = running[l] && vis[view[l]] && alpha >= kMinAlpha;
        const float col = chan[l] == 0 ? c0 : (chan[l] == 1 ? c1 : c2);
        const float tr = trans[l];
        const float next = tr * (1.0f - alpha);
        acc[l] = use ? acc[l] + col * alpha * tr : acc[l];
        trans[l] = use ? next : tr;
        running[l] = running[l] && !(use && next < kMinTransmittance);
        live += running[l];
      }
      if (live == 0) break;
    }
  }
  for (int l = 0; l < n; ++l) out[ranks[l]] = acc[l] + f.background[chan[l]] * trans[l];
}

}  // namespace

display::InterlacedImage blend(const SortedSplats& sorted, const ProjectionBuffers& buffers,
                               const camera::Clustering& clustering,
                               const display::RemapTable& mapping,
                               const display::ViewpointMatrix& matrix, const Rgb& background) {
  check_inputs(sorted, buffers, clustering, mapping, matrix);
  const auto& cfg = matrix.config();
  display::InterlacedImage out{cfg, Image(cfg.width, cfg.height)};
  const Frame frame{sorted,
                    buffers,
                    clustering,
                    matrix,
                    background,
                    buffers.means2d.empty() ? nullptr : buffers.means2d.front().data(),
                    buffers.num_views,
                    buffers.num_clusters};
  float* dst = out.pixels.data.data();
  const int tiles = cfg.num_tiles();
  // Every subpixel is written by exactly one lane, so the schedule cannot
  // change the result.
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < tiles; ++t) {
    const auto ranks = mapping.tile(t);
    for (std::size_t p = 0; p < ranks.size(); p += kPacketLanes) {
      blend_packet(frame, t, ranks.subspan(p, std::min<std::size_t>(kPacketLanes, ranks.size() - p)),
                   dst);
    }
  }
  return out;
}

display::InterlacedImage blend_reference(const SortedSplats& sorted,
                                         const ProjectionBuffers& buffers,
                                         const camera::Clustering& clustering,
                                         const display::RemapTable& mapping,
                                         const display::ViewpointMatrix& matrix,
                                         const Rgb& background) {
  check_inputs(sorted, buffers, clustering, mapping, matrix);
  const auto& cfg = matrix.config();
  display::InterlacedImage out{cfg, Image(cfg.width, cfg.height)};
  for (int t = 0; t < cfg.num_tiles(); ++t) {
    for (const std::uint32_t s : mapping.tile(t)) {
      const display::Subpixel p = display::subpixel_coord(cfg, s);
      const int j = matrix[s];
      const int k = clustering.cluster_of(j);
      const float px = static_cast<float>(p.x) + 0.5f, py = static_cast<float>(p.y) + 0.5f;
      float color = 0.0f, trans = 1.0f;
      const auto range = sorted.ranges.range(t, k);
      for (std::uint32_t e = range.begin; e < range.end; ++e) {
        const std::uint32_t i = sorted.gaussians[e];
        if (!buffers.view_visible[buffers.view_slot(i, j)]) continue;
        const SplatRecord& sp = buffers.splats[buffers.cluster_slot(i, k)];
        const Eigen::Vector2f& mean = buffers.means2d[buffers.view_slot(i, j)];
        const float alpha =
            splat::alpha_at(sp.opacity, sp.conic_a, sp.conic_b, sp.conic_c, px - mean.x(),
                            py - mean.y());
        if (alpha < kMinAlpha) continue;
        color = color + sp.color[p.u] * alpha * trans;
        trans = trans * (1.0f - alpha);
        if (trans < kMinTransmittance) break;
      }
      out.pixels.data[s] = color + background[p.u] * trans;
    }
  }
  return out;
}

}  // namespace lfr::raster
