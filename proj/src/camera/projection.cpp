// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "lfr/camera.hpp"
#include "lfr/error.hpp"

namespace lfr::camera {

Clustering::Clustering(int num_views, int cluster_size)
    : num_views_(num_views), cluster_size_(cluster_size) {
  if (num_views < 1 || cluster_size < 1) {
    throw Error(ErrorCode::kInvalidSize, "num_views and cluster_size must be >= 1");
  }
  num_clusters_ = (num_views + cluster_size - 1) / cluster_size;
}

int Clustering::representative(int k) const {
  return std::min(k * cluster_size_ + cluster_size_ / 2, num_views_ - 1);
}

int Clustering::end(int k) const { return std::min((k + 1) * cluster_size_, num_views_); }

std::vector<int> Clustering::padded_views(int k) const {
  std::vector<int> views(cluster_size_);
  for (int l = 0; l < cluster_size_; ++l) views[l] = std::min(k * cluster_size_ + l, num_views_ - 1);
  return views;
}

Clustering cluster_views(int num_views, int cluster_size) {
  return Clustering(num_views, cluster_size);
}

MeanProjection project_mean(const Camera& camera, const Eigen::Vector3f& mean) {
  const Eigen::Vector3f t = camera.to_camera(mean);
  MeanProjection out;
  out.depth = t.z();
  out.visible = t.z() >= camera.znear;
  if (out.visible) {
    out.mean2d = Eigen::Vector2f(camera.fx * (t.x() / t.z()) + camera.cx,
                                 camera.fy * (t.y() / t.z()) + camera.cy);
  }
  return out;
}

SharedProjection project_shared(const Camera& camera, const scene::Gaussian3D& gaussian,
                                int sh_degree) {
  const Eigen::Vector3f t = camera.to_camera(gaussian.mean);
  const float z = t.z();

  // Keep the Jacobian of splats far outside the frustum bounded.
  const float lim_x = 1.3f * (0.5f * camera.width / camera.fx);
  const float lim_y = 1.3f * (0.5f * camera.height / camera.fy);
  const float tx = std::clamp(t.x() / z, -lim_x, lim_x) * z;
  const float ty = std::clamp(t.y() / z, -lim_y, lim_y) * z;

  Eigen::Matrix<float, 2, 3> jac;
  jac << camera.fx / z, 0.0f, -camera.fx * tx / (z * z),  //
      0.0f, camera.fy / z, -camera.fy * ty / (z * z);
  const Eigen::Matrix<float, 2, 3> jw = jac * camera.rotation;
  const Eigen::Matrix3f sigma = scene::covariance_from_params(gaussian.rotation, gaussian.scale);
  const Eigen::Matrix2f cov = jw * sigma * jw.transpose();

  const float xx = cov(0, 0), yy = cov(1, 1);
  const float xy = 0.5f * (cov(0, 1) + cov(1, 0));
  const float det_raw = xx * yy - xy * xy;
  const float dxx = xx + kLowPassDilation, dyy = yy + kLowPassDilation;
  const float det = dxx * dyy - xy * xy;
  if (!(det > 0.0f) || !std::isfinite(det)) {
    throw Error(ErrorCode::kDegenerateCovariance, "2D covariance determinant " + std::to_string(det));
  }

  SharedProjection out;
  Conic2D& conic = out.conic;
  conic.a = dyy / det;
  conic.b = -xy / det;
  conic.c = dxx / det;
  conic.cov_xx = dxx;
  conic.cov_xy = xy;
  conic.cov_yy = dyy;
  conic.compensation = std::sqrt(std::max(det_raw, 0.0f) / det);

  out.depth = z;
  out.eff_opacity = gaussian.opacity * conic.compensation;
  // eff_opacity * exp(-q/2) = 1/255  <=>  q = 2 ln(255 eff_opacity).
  conic.cutoff_q = out.eff_opacity > kAlphaThreshold
                       ? 2.0f * std::log(255.0f * out.eff_opacity)
                       : 0.0f;
  const float mid = 0.5f * (dxx + dyy);
  const float lambda_max = mid + std::sqrt(std::max(mid * mid - det, 0.0f));
  conic.radius = std::sqrt(lambda_max * conic.cutoff_q);

  const Eigen::Vector3f dir = (gaussian.mean - camera.position()).normalized();
  out.color = scene::eval_sh(gaussian.sh_coeffs(sh_degree), sh_degree, dir);
  return out;
}

}  // namespace lfr::camera
