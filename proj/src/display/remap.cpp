// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>

#include "lfr/display.hpp"
#include "lfr/error.hpp"

namespace lfr::display {

namespace {

struct TileGeometry {
  int x0, y0, x1, y1;  // pixel bounds, clipped to the panel
  std::uint32_t count() const { return static_cast<std::uint32_t>((x1 - x0) * (y1 - y0) * 3); }
};

TileGeometry tile_geometry(const DisplayConfig& c, int t) {
  const int tx = t % c.tiles_x(), ty = t / c.tiles_x();
  const int x0 = tx * c.tile_size, y0 = ty * c.tile_size;
  return {x0, y0, std::min(x0 + c.tile_size, c.width), std::min(y0 + c.tile_size, c.height)};
}

std::vector<std::uint32_t> tile_offsets(const DisplayConfig& c) {
  std::vector<std::uint32_t> offsets(c.num_tiles() + 1, 0);
  for (int t = 0; t < c.num_tiles(); ++t) offsets[t + 1] = offsets[t] + tile_geometry(c, t).count();
  return offsets;
}

// Row-major, subpixel-minor enumeration of one tile.
void fill_row_major(const DisplayConfig& c, const TileGeometry& g, std::uint32_t* out) {
  for (int y = g.y0; y < g.y1; ++y) {
    const auto row = static_cast<std::uint32_t>(subpixel_index(c, g.x0, y, 0));
    const auto n = static_cast<std::uint32_t>((g.x1 - g.x0) * 3);
    for (std::uint32_t s = 0; s < n; ++s) *out++ = row + s;
  }
}

}  // namespace

std::uint32_t RemapTable::local_index(int t, std::uint32_t subpixel) const {
  const TileGeometry g = tile_geometry(config_, t);
  const Subpixel p = subpixel_coord(config_, subpixel);
  return static_cast<std::uint32_t>(((p.y - g.y0) * (g.x1 - g.x0) + (p.x - g.x0)) * 3 + p.u);
}

RemapTable build_raster_table(const DisplayConfig& config) {
  config.validate();
  auto offsets = tile_offsets(config);
  std::vector<std::uint32_t> order(config.num_subpixels());
#pragma omp parallel for schedule(static)
  for (int t = 0; t < config.num_tiles(); ++t) {
    fill_row_major(config, tile_geometry(config, t), order.data() + offsets[t]);
  }
  return RemapTable(config, std::move(offsets), std::move(order));
}

RemapTable build_remap_table(const ViewpointMatrix& matrix, const DisplayConfig& config) {
  if (!(matrix.config() == config)) {
    throw Error(ErrorCode::kConfigMismatch, "viewpoint matrix was built for another display");
  }
  config.validate();
  auto offsets = tile_offsets(config);
  std::vector<std::uint32_t> order(config.num_subpixels());
  const int views = config.num_views;
  const auto data = matrix.data();

#pragma omp parallel
  {
    std::vector<std::uint32_t> row_major;
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(views) + 1);
#pragma omp for schedule(static)
    for (int t = 0; t < config.num_tiles(); ++t) {
      const TileGeometry g = tile_geometry(config, t);
      row_major.resize(g.count());
      fill_row_major(config, g, row_major.data());
      std::uint32_t* out = order.data() + offsets[t];
      if (views <= static_cast<int>(row_major.size()) * 4) {
        // Stable counting sort by view index.
        std::fill(counts.begin(), counts.end(), 0u);
        for (const std::uint32_t s : row_major) ++counts[data[s] + 1];
        std::partial_sum(counts.begin(), counts.end(), counts.begin());
        for (const std::uint32_t s : row_major) out[counts[data[s]]++] = s;
      } else {
        std::copy(row_major.begin(), row_major.end(), out);
        std::stable_sort(out, out + row_major.size(),
                         [&](std::uint32_t a, std::uint32_t b) { return data[a] < data[b]; });
      }
    }
  }
  return RemapTable(config, std::move(offsets), std::move(order));
}

}  // namespace lfr::display
