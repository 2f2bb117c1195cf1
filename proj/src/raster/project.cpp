// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/error.hpp"
#include "lfr/raster.hpp"

namespace lfr::raster {

std::size_t ProjectionBuffers::bytes() const {
  return means2d.size() * sizeof(Eigen::Vector2f) + view_visible.size() +
         splats.size() * sizeof(SplatRecord) + extents.size() * sizeof(SplatExtent) +
         cluster_visible.size();
}

ProjectionBuffers project_all(const scene::GaussianScene& scene,
                              std::span<const camera::Camera> views,
                              const camera::Clustering& clustering) {
  if (views.size() != static_cast<std::size_t>(clustering.num_views())) {
    throw Error(ErrorCode::kInconsistentInputs, "rig size does not match the clustering");
  }
  ProjectionBuffers out;
  out.num_gaussians = static_cast<int>(scene.size());
  out.num_views = clustering.num_views();
  out.num_clusters = clustering.num_clusters();
  const auto m = static_cast<std::ptrdiff_t>(scene.size());
  const std::ptrdiff_t n = out.num_views, k = out.num_clusters;
  out.means2d.assign(m * n, Eigen::Vector2f::Zero());
  out.view_visible.assign(m * n, 0);
  out.splats.assign(m * k, SplatRecord{});
  out.extents.assign(m * k, SplatExtent{});
  out.cluster_visible.assign(m * k, 0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < m * n; ++r) {
    const auto p = camera::project_mean(views[r % n], scene[r / n].mean);
    out.means2d[r] = p.mean2d;
    out.view_visible[r] = p.visible;
  }

  std::size_t degenerate = 0;
  const int degree = scene.sh_degree();
#pragma omp parallel for schedule(static) reduction(+ : degenerate)
  for (std::ptrdiff_t r = 0; r < m * k; ++r) {
    const auto& g = scene[r / k];
    const camera::Camera& rep = views[clustering.representative(static_cast<int>(r % k))];
    if (!camera::project_mean(rep, g.mean).visible) continue;
    camera::SharedProjection sp;
    try {
      sp = camera::project_shared(rep, g, degree);
    } catch (const Error&) {
      ++degenerate;
      continue;
    }
    if (!sp.contributes()) continue;
    out.splats[r] = {sp.conic.a,   sp.conic.b,   sp.conic.c,   sp.eff_opacity,
                     {sp.color.x(), sp.color.y(), sp.color.z()}, sp.depth};
    out.extents[r] = {sp.conic.cov_xx, sp.conic.cov_xy, sp.conic.cov_yy, sp.conic.cutoff_q};
    out.cluster_visible[r] = 1;
  }
  out.degenerate_count = degenerate;
  return out;
}

}  // namespace lfr::raster
