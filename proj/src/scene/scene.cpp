// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "lfr/error.hpp"
#include "lfr/scene.hpp"

namespace lfr::scene {

namespace {

bool finite(const Eigen::Vector3f& v) { return v.allFinite(); }

}  // namespace

GaussianScene::GaussianScene(std::vector<Gaussian3D> gaussians, int sh_degree)
    : gaussians_(std::move(gaussians)), sh_degree_(sh_degree) {
  if (sh_degree < 0 || sh_degree > kMaxShDegree) {
    throw Error(ErrorCode::kInvalidSpec, "sh_degree must be in [0, 3]");
  }
  const int used = sh_coeff_count(sh_degree);
  for (std::size_t i = 0; i < gaussians_.size(); ++i) {
    const auto& g = gaussians_[i];
    const std::string where = "gaussian " + std::to_string(i);
    if (!finite(g.mean) || !finite(g.scale) || !g.rotation.coeffs().allFinite() ||
        !std::isfinite(g.opacity)) {
      throw Error(ErrorCode::kNonFiniteValue, where);
    }
    if (std::abs(g.rotation.norm() - 1.0f) > 1e-4f) {
      throw Error(ErrorCode::kInvalidSpec, where + ": rotation is not unit length");
    }
    if ((g.scale.array() <= 0.0f).any()) {
      throw Error(ErrorCode::kInvalidSpec, where + ": scale must be positive");
    }
    if (g.opacity < 0.0f || g.opacity > 1.0f) {
      throw Error(ErrorCode::kInvalidSpec, where + ": opacity outside [0,1]");
    }
    for (int c = 0; c < used; ++c) {
      if (!std::isfinite(g.sh[c])) throw Error(ErrorCode::kNonFiniteValue, where + ": sh");
    }
    for (int c = used; c < kMaxShCoeffs; ++c) {
      if (g.sh[c] != 0.0f) {
        throw Error(ErrorCode::kInvalidSpec, where + ": coefficients beyond sh_degree");
      }
    }
  }
  if (!gaussians_.empty()) {
    bounds_.min = bounds_.max = gaussians_.front().mean;
    for (const auto& g : gaussians_) {
      bounds_.min = bounds_.min.cwiseMin(g.mean);
      bounds_.max = bounds_.max.cwiseMax(g.mean);
    }
  }
}

Eigen::Matrix3f covariance_from_params(const Eigen::Quaternionf& rotation,
                                       const Eigen::Vector3f& scale) {
  const Eigen::Matrix3f r = rotation.toRotationMatrix();
  const Eigen::Matrix3f m = r * scale.asDiagonal();
  Eigen::Matrix3f sigma = m * m.transpose();
  // Exact symmetry regardless of rounding order.
  sigma = 0.5f * (sigma + sigma.transpose()).eval();
  return sigma;
}

Eigen::Vector3f eval_sh_unclamped(std::span<const float> sh, int degree,
                                  const Eigen::Vector3f& dir) {
  using namespace sh_constants;
  if (degree < 0 || degree > kMaxShDegree ||
      sh.size() != static_cast<std::size_t>(sh_coeff_count(degree))) {
    throw Error(ErrorCode::kDegreeMismatch,
                "degree " + std::to_string(degree) + " with " + std::to_string(sh.size()) +
                    " coefficients");
  }
  const int rest = (degree + 1) * (degree + 1) - 1;
  // Coefficient of basis function b (b >= 1) for channel ch.
  auto coef = [&](int ch, int b) { return sh[3 + ch * rest + (b - 1)]; };

  Eigen::Vector3f rgb;
  for (int ch = 0; ch < 3; ++ch) {
    float v = kC0 * sh[ch];
    if (degree > 0) {
      const float x = dir.x(), y = dir.y(), z = dir.z();
      v = v - kC1 * y * coef(ch, 1) + kC1 * z * coef(ch, 2) - kC1 * x * coef(ch, 3);
      if (degree > 1) {
        const float xx = x * x, yy = y * y, zz = z * z;
        const float xy = x * y, yz = y * z, xz = x * z;
        v = v + kC2[0] * xy * coef(ch, 4) + kC2[1] * yz * coef(ch, 5) +
            kC2[2] * (2.0f * zz - xx - yy) * coef(ch, 6) + kC2[3] * xz * coef(ch, 7) +
            kC2[4] * (xx - yy) * coef(ch, 8);
        if (degree > 2) {
          v = v + kC3[0] * y * (3.0f * xx - yy) * coef(ch, 9) + kC3[1] * xy * z * coef(ch, 10) +
              kC3[2] * y * (4.0f * zz - xx - yy) * coef(ch, 11) +
              kC3[3] * z * (2.0f * zz - 3.0f * xx - 3.0f * yy) * coef(ch, 12) +
              kC3[4] * x * (4.0f * zz - xx - yy) * coef(ch, 13) +
              kC3[5] * z * (xx - yy) * coef(ch, 14) + kC3[6] * x * (xx - 3.0f * yy) * coef(ch, 15);
        }
      }
    }
    rgb[ch] = v + 0.5f;
  }
  return rgb;
}

Eigen::Vector3f eval_sh(std::span<const float> sh, int degree, const Eigen::Vector3f& dir) {
  return eval_sh_unclamped(sh, degree, dir).cwiseMax(0.0f).cwiseMin(1.0f);
}

}  // namespace lfr::scene
