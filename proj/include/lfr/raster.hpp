// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lfr/camera.hpp"
#include "lfr/display.hpp"
#include "lfr/image.hpp"
#include "lfr/scene.hpp"

namespace lfr::raster {

/// Cluster-shared attributes read by the blend stage; 32 bytes.
struct SplatRecord {
  float conic_a = 0.0f;
  float conic_b = 0.0f;
  float conic_c = 0.0f;
  float opacity = 0.0f;  // opacity * dilation compensation
  float color[3] = {0.0f, 0.0f, 0.0f};
  float depth = 0.0f;
};
static_assert(sizeof(SplatRecord) == 32);

/// Cluster-shared culling data read only by key generation.
struct SplatExtent {
  float cov_xx = 0.0f;
  float cov_xy = 0.0f;
  float cov_yy = 0.0f;
  float cutoff_q = 0.0f;
};

/// Stage-1 output. Per-view arrays are indexed i * N + j, per-cluster arrays
/// i * K + k.
struct ProjectionBuffers {
  int num_gaussians = 0;
  int num_views = 0;
  int num_clusters = 0;
  std::vector<Eigen::Vector2f> means2d;
  std::vector<std::uint8_t> view_visible;
  std::vector<SplatRecord> splats;
  std::vector<SplatExtent> extents;
  std::vector<std::uint8_t> cluster_visible;
  std::size_t degenerate_count = 0;

  std::size_t view_slot(int i, int j) const {
    return static_cast<std::size_t>(i) * num_views + j;
  }
  std::size_t cluster_slot(int i, int k) const {
    return static_cast<std::size_t>(i) * num_clusters + k;
  }
  std::size_t bytes() const;
};

/// Per-view means for every (i, j); depth, conic, color and opacity once per
/// (i, k) from the cluster representative. A Gaussian that is behind the
/// representative, cannot reach 1/255, or has a degenerate covariance is
/// invisible for the whole cluster (degenerate ones are counted).
ProjectionBuffers project_all(const scene::GaussianScene& scene,
                              std::span<const camera::Camera> views,
                              const camera::Clustering& clustering);

// --- Keys ------------------------------------------------------------------

/// ceil(log2(max(K, 2))).
int cluster_bits(int num_clusters);

/// (t << (32 + Bit_K)) | (k << 32) | bits(depth). Depth must be positive.
std::uint64_t pack_key(std::uint32_t tile, std::uint32_t cluster, float depth, int bits_k);
std::uint32_t key_tile(std::uint64_t key, int bits_k);
std::uint32_t key_cluster(std::uint64_t key, int bits_k);
float key_depth(std::uint64_t key);

struct KeyedSplat {
  std::uint64_t key = 0;
  std::uint32_t gaussian = 0;

  bool operator==(const KeyedSplat&) const = default;
};

struct KeyGenOptions {
  /// Grows every tile rectangle before the ellipse test; used to inject
  /// superfluous splats.
  float tile_margin_px = 0.0f;
};

/// Appends, in ascending tile order, every tile of the panel whose pixel
/// centers can be reached by the ellipse {p : q(p - mean) <= cutoff_q}.
void overlapped_tiles(const Eigen::Vector2f& mean, const SplatRecord& splat,
                      const SplatExtent& extent, const display::DisplayConfig& config,
                      float margin_px, std::vector<std::uint32_t>& out);

/// One key per (i, k, t) where t is in the union over views j in V_k of the
/// tiles overlapped at mu_{i,j} with the cluster conic. Emission order is
/// Gaussian-major, then cluster, then tile. Throws TileIdOverflow.
std::vector<KeyedSplat> generate_keys(const ProjectionBuffers& buffers,
                                      const camera::Clustering& clustering,
                                      const display::DisplayConfig& config,
                                      const KeyGenOptions& options = {});

/// Serial set-union formulation of generate_keys, kept for testing.
std::vector<KeyedSplat> generate_keys_reference(const ProjectionBuffers& buffers,
                                                const camera::Clustering& clustering,
                                                const display::DisplayConfig& config,
                                                const KeyGenOptions& options = {});

// --- Sorting ---------------------------------------------------------------

/// [S_{t,k}, E_{t,k}) offsets into the sorted payload for every tile/cluster
/// pair, stored densely as a prefix array over slot t * K + k.
class GaussianRangeTable {
 public:
  struct Range {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
  };

  GaussianRangeTable() = default;
  GaussianRangeTable(int num_tiles, int num_clusters, std::vector<std::uint32_t> offsets)
      : num_tiles_(num_tiles), num_clusters_(num_clusters), offsets_(std::move(offsets)) {}

  int num_tiles() const { return num_tiles_; }
  int num_clusters() const { return num_clusters_; }
  Range range(int tile, int cluster) const {
    const std::size_t slot = static_cast<std::size_t>(tile) * num_clusters_ + cluster;
    return {offsets_[slot], offsets_[slot + 1]};
  }
  std::span<const std::uint32_t> offsets() const { return offsets_; }

 private:
  int num_tiles_ = 0;
  int num_clusters_ = 0;
  std::vector<std::uint32_t> offsets_;
};

struct SortedSplats {
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> gaussians;
  GaussianRangeTable ranges;
  int bits_k = 1;
};

/// Stable LSD radix sort on the significant key bits, then a counting pass
/// for the range table.
SortedSplats sort_splats(std::vector<KeyedSplat> keys, int num_tiles, int num_clusters);

/// std::stable_sort formulation, kept for testing.
SortedSplats sort_splats_reference(std::vector<KeyedSplat> keys, int num_tiles,
                                   int num_clusters);

// --- Blending --------------------------------------------------------------

/// Lanes per blend packet; packets never cross tile boundaries.
inline constexpr int kPacketLanes = 32;

/// Alpha-blends every subpixel of the panel. Ranks are processed in packets
/// of kPacketLanes consecutive entries of `mapping`; lanes that read the same
/// (tile, cluster) list traverse it in lockstep. Throws InconsistentInputs.
display::InterlacedImage blend(const SortedSplats& sorted, const ProjectionBuffers& buffers,
                               const camera::Clustering& clustering,
                               const display::RemapTable& mapping,
                               const display::ViewpointMatrix& matrix, const Rgb& background);

/// One subpixel at a time, serial. Bit-identical to blend().
display::InterlacedImage blend_reference(const SortedSplats& sorted,
                                         const ProjectionBuffers& buffers,
                                         const camera::Clustering& clustering,
                                         const display::RemapTable& mapping,
                                         const display::ViewpointMatrix& matrix,
                                         const Rgb& background);

// --- Pipeline --------------------------------------------------------------

struct RenderOptions {
  int cluster_size = 8;
  bool disable_reuse = false;  // forces cluster_size = 1
  bool disable_remap = false;  // raster-order thread mapping
  Rgb background{0.0f, 0.0f, 0.0f};
  KeyGenOptions keys;
  bool keep_artifacts = false;
};

struct StageTimings {
  double projection_ms = 0.0;
  double key_gen_ms = 0.0;
  double sort_ms = 0.0;
  double blend_ms = 0.0;
  std::uint64_t pair_count = 0;
  std::uint64_t peak_buffer_bytes = 0;
  std::uint64_t degenerate_count = 0;

  double total_ms() const { return projection_ms + key_gen_ms + sort_ms + blend_ms; }
};

/// Intermediate buffers of one frame, for analysis tools.
struct FrameArtifacts {
  camera::Clustering clustering;
  ProjectionBuffers buffers;
  SortedSplats sorted;
};

struct RenderResult {
  display::InterlacedImage image;
  StageTimings timings;
  std::optional<FrameArtifacts> artifacts;
};

/// Holds the per-display tables (V, remap and raster mappings), which depend
/// only on the display and are reused across frames.
class LightFieldRenderer {
 public:
  explicit LightFieldRenderer(const display::DisplayConfig& config);

  const display::DisplayConfig& config() const { return config_; }
  const display::ViewpointMatrix& matrix() const { return matrix_; }
  const display::RemapTable& remap_table() const { return remap_; }
  const display::RemapTable& raster_table() const { return raster_; }

  /// Throws InconsistentInputs when the rig does not match the panel.
  RenderResult render(const scene::GaussianScene& scene, std::span<const camera::Camera> rig,
                      const RenderOptions& options) const;

 private:
  display::DisplayConfig config_;
  display::ViewpointMatrix matrix_;
  display::RemapTable remap_;
  display::RemapTable raster_;
};

RenderResult render_lightfield(const scene::GaussianScene& scene,
                               const display::DisplayConfig& config,
                               std::span<const camera::Camera> rig, const RenderOptions& options);

}  // namespace lfr::raster
