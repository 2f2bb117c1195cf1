// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfr/image.hpp"

namespace lfr::display {

/// Lenticular panel parameters. Lengths along the lens axis are in subpixel
/// units; the tilt is in radians.
struct DisplayConfig {
  int width = 0;
  int height = 0;
  double tilt = 0.0;
  double line_count = 1.0;
  double lens_offset = 0.0;
  int num_views = 1;
  int tile_size = 16;

  /// Throws InvalidConfig.
  void validate() const;

  int tiles_x() const { return (width + tile_size - 1) / tile_size; }
  int tiles_y() const { return (height + tile_size - 1) / tile_size; }
  int num_tiles() const { return tiles_x() * tiles_y(); }
  std::size_t num_subpixels() const { return static_cast<std::size_t>(width) * height * 3; }

  bool operator==(const DisplayConfig&) const = default;
};

/// key=value text format; angles are degrees in the file. Unknown keys are
/// rejected so typos cannot go unnoticed.
DisplayConfig parse_display_config(std::string_view text);
DisplayConfig load_display_config(const std::filesystem::path& path);
std::string format_display_config(const DisplayConfig& config);

/// Degree/radian conversion for tilt angles. tilt_to_degrees picks the
/// double nearest to the exact value that converts back to `radians`
/// bit-for-bit, so formatted configs reload identically.
double tilt_from_degrees(double degrees);
double tilt_to_degrees(double radians);

/// Subpixel coordinate (x, y, u) on the panel.
struct Subpixel {
  int x = 0;
  int y = 0;
  int u = 0;
};

inline std::size_t subpixel_index(const DisplayConfig& c, int x, int y, int u) {
  return (static_cast<std::size_t>(y) * c.width + x) * 3 + u;
}

inline Subpixel subpixel_coord(const DisplayConfig& c, std::size_t index) {
  const std::size_t pixel = index / 3;
  return {static_cast<int>(pixel % c.width), static_cast<int>(pixel / c.width),
          static_cast<int>(index % 3)};
}

/// Viewpoint index of one subpixel; d_offset is evaluated in double precision
/// and reduced with a floor-mod into [0, Lx).
int viewpoint_index(const DisplayConfig& config, int x, int y, int u);

using ViewIndex = std::uint16_t;

/// Per-subpixel view assignment V for a panel.
class ViewpointMatrix {
 public:
  ViewpointMatrix() = default;
  ViewpointMatrix(DisplayConfig config, std::vector<ViewIndex> data)
      : config_(config), data_(std::move(data)) {}

  const DisplayConfig& config() const { return config_; }
  std::span<const ViewIndex> data() const { return data_; }
  ViewIndex at(int x, int y, int u) const { return data_[subpixel_index(config_, x, y, u)]; }
  ViewIndex operator[](std::size_t index) const { return data_[index]; }

  bool operator==(const ViewpointMatrix&) const = default;

 private:
  DisplayConfig config_;
  std::vector<ViewIndex> data_;
};

ViewpointMatrix build_viewpoint_matrix(const DisplayConfig& config);

/// Per-tile ordering of subpixels into thread ranks. Ranks of tile t occupy
/// [tile_begin(t), tile_end(t)) of the global rank space; each entry is a
/// global subpixel index.
class RemapTable {
 public:
  RemapTable() = default;
  RemapTable(DisplayConfig config, std::vector<std::uint32_t> tile_offsets,
             std::vector<std::uint32_t> order)
      : config_(config), tile_offsets_(std::move(tile_offsets)), order_(std::move(order)) {}

  const DisplayConfig& config() const { return config_; }
  int num_tiles() const { return static_cast<int>(tile_offsets_.size()) - 1; }
  std::uint32_t tile_begin(int t) const { return tile_offsets_[t]; }
  std::uint32_t tile_end(int t) const { return tile_offsets_[t + 1]; }
  std::size_t size() const { return order_.size(); }

  /// Global rank r -> subpixel index.
  std::uint32_t operator[](std::size_t rank) const { return order_[rank]; }
  std::span<const std::uint32_t> tile(int t) const {
    return std::span<const std::uint32_t>(order_).subspan(tile_begin(t),
                                                          tile_end(t) - tile_begin(t));
  }
  Subpixel coord(std::size_t rank) const { return subpixel_coord(config_, order_[rank]); }

  /// Local row-major (subpixel-minor) index of a global subpixel within its tile.
  std::uint32_t local_index(int t, std::uint32_t subpixel) const;

  bool operator==(const RemapTable&) const = default;

 private:
  DisplayConfig config_;
  std::vector<std::uint32_t> tile_offsets_;
  std::vector<std::uint32_t> order_;
};

/// View-coherent mapping: each tile's subpixels in row-major order, stably
/// sorted by viewpoint index. Throws ConfigMismatch.
RemapTable build_remap_table(const ViewpointMatrix& matrix, const DisplayConfig& config);

/// Row-major thread mapping (the identity permutation in every tile).
RemapTable build_raster_table(const DisplayConfig& config);

/// Panel-resolution image in which every subpixel carries the radiance of
/// its assigned view.
struct InterlacedImage {
  DisplayConfig config;
  Image pixels;
};

/// output[x,y,u] = views[V[x,y,u]][x,y,u]. Throws CountMismatch/SizeMismatch.
InterlacedImage interlace(std::span<const Image> views, const ViewpointMatrix& matrix);

struct MaskedImage {
  Image image;
  std::vector<std::uint8_t> mask;  // one entry per subpixel
  std::size_t count = 0;
};

/// Extracts the subpixels assigned to view j. Throws ViewOutOfRange.
MaskedImage deinterlace(const InterlacedImage& img, const ViewpointMatrix& matrix, int view);

/// One CSV row per y; entries for each (x, u), x-major, u-minor.
void write_viewpoint_csv(const ViewpointMatrix& matrix, std::ostream& out);

/// 3W x H RGB8 image, one pixel per subpixel, view index mapped to hue.
std::vector<std::uint8_t> viewpoint_false_color(const ViewpointMatrix& matrix);

}  // namespace lfr::display
