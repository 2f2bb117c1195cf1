// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>

#include "lfr/error.hpp"
#include "lfr/raster.hpp"

namespace lfr::raster {

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

LightFieldRenderer::LightFieldRenderer(const display::DisplayConfig& config)
    : config_(config),
      matrix_(display::build_viewpoint_matrix(config)),
      remap_(display::build_remap_table(matrix_, config)),
      raster_(display::build_raster_table(config)) {}

RenderResult LightFieldRenderer::render(const scene::GaussianScene& scene,
                                        std::span<const camera::Camera> rig,
                                        const RenderOptions& options) const {
  if (rig.size() != static_cast<std::size_t>(config_.num_views)) {
    throw Error(ErrorCode::kInconsistentInputs,
                "rig has " + std::to_string(rig.size()) + " cameras, display expects " +
                    std::to_string(config_.num_views));
  }
  for (const auto& cam : rig) {
    if (cam.width != config_.width || cam.height != config_.height) {
      throw Error(ErrorCode::kInconsistentInputs, "camera resolution does not match the panel");
    }
    cam.validate();
  }
  const int cluster_size = options.disable_reuse ? 1 : options.cluster_size;
  camera::Clustering clustering(config_.num_views, cluster_size);
  const display::RemapTable& mapping = options.disable_remap ? raster_ : remap_;

  RenderResult result;
  StageTimings& timings = result.timings;
  Stopwatch clock;
  ProjectionBuffers buffers = project_all(scene, rig, clustering);
  timings.projection_ms = clock.lap_ms();
  std::vector<KeyedSplat> keys = generate_keys(buffers, clustering, config_, options.keys);
  timings.key_gen_ms = clock.lap_ms();
  timings.pair_count = keys.size();
  SortedSplats sorted = sort_splats(std::move(keys), config_.num_tiles(), clustering.num_clusters());
  timings.sort_ms = clock.lap_ms();
  result.image = blend(sorted, buffers, clustering, mapping, matrix_, options.background);
  timings.blend_ms = clock.lap_ms();

  // Live buffers peak either while sorting (keys plus radix scratch) or while
  // blending (sorted payload, range table and the output image).
  const std::uint64_t pairs = timings.pair_count;
  const std::uint64_t sort_peak = 2 * pairs * sizeof(KeyedSplat);
  const std::uint64_t blend_peak = pairs * (sizeof(std::uint64_t) + sizeof(std::uint32_t)) +
                                   sorted.ranges.offsets().size_bytes() +
                                   result.image.pixels.size() * sizeof(float);
  timings.peak_buffer_bytes = buffers.bytes() + std::max(sort_peak, blend_peak);
  timings.degenerate_count = buffers.degenerate_count;

  if (options.keep_artifacts) {
    result.artifacts = FrameArtifacts{clustering, std::move(buffers), std::move(sorted)};
  }
  return result;
}

RenderResult render_lightfield(const scene::GaussianScene& scene,
                               const display::DisplayConfig& config,
                               std::span<const camera::Camera> rig, const RenderOptions& options) {
  return LightFieldRenderer(config).render(scene, rig, options);
}

}  // namespace lfr::raster
