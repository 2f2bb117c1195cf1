// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lfr::scene {

inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = 3 * (kMaxShDegree + 1) * (kMaxShDegree + 1);

/// Number of scalar SH coefficients (all three channels) for a degree.
constexpr int sh_coeff_count(int degree) { return 3 * (degree + 1) * (degree + 1); }

/// One anisotropic Gaussian. Opacity is post-sigmoid and scale post-exp.
///
/// SH layout follows the PLY property order: the DC triplet (r,g,b) first,
/// then the higher bands channel-major, i.e. coefficient b >= 1 of channel c
/// lives at 3 + c * ((deg+1)^2 - 1) + (b - 1).
struct Gaussian3D {
  Eigen::Vector3f mean = Eigen::Vector3f::Zero();
  Eigen::Quaternionf rotation = Eigen::Quaternionf::Identity();
  Eigen::Vector3f scale = Eigen::Vector3f::Ones();
  float opacity = 1.0f;
  std::array<float, kMaxShCoeffs> sh{};

  std::span<const float> sh_coeffs(int degree) const {
    return {sh.data(), static_cast<std::size_t>(sh_coeff_count(degree))};
  }
};

struct Aabb {
  Eigen::Vector3f min = Eigen::Vector3f::Zero();
  Eigen::Vector3f max = Eigen::Vector3f::Zero();

  Eigen::Vector3f center() const { return 0.5f * (min + max); }
};

/// Immutable, validated set of Gaussians sharing one SH degree.
class GaussianScene {
 public:
  GaussianScene() = default;

  /// Throws InvalidSpec on any violated invariant (non-unit rotation, scale
  /// <= 0, opacity outside [0,1], non-finite values, bad degree).
  GaussianScene(std::vector<Gaussian3D> gaussians, int sh_degree);

  const std::vector<Gaussian3D>& gaussians() const { return gaussians_; }
  std::size_t size() const { return gaussians_.size(); }
  bool empty() const { return gaussians_.empty(); }
  int sh_degree() const { return sh_degree_; }
  const Aabb& bounds() const { return bounds_; }
  const Gaussian3D& operator[](std::size_t i) const { return gaussians_[i]; }

 private:
  std::vector<Gaussian3D> gaussians_;
  int sh_degree_ = 0;
  Aabb bounds_;
};

// --- PLY ingestion -------------------------------------------------------

/// Parses a binary little-endian 3DGS PLY. Opacity logits go through a
/// sigmoid, log-scales through exp, rotations are renormalized. Unknown
/// properties are skipped with a warning on stderr.
GaussianScene load_ply(std::span<const std::byte> bytes);
GaussianScene load_ply_file(const std::filesystem::path& path);

/// Writes the INRIA property order (normals written as zeros). Opacity is
/// clamped to [1e-7, 1 - 1e-7] before taking the logit.
std::vector<std::byte> save_ply(const GaussianScene& scene);
void save_ply_file(const GaussianScene& scene, const std::filesystem::path& path);

// --- Synthetic scenes ----------------------------------------------------

enum class Layout { kGrid, kSphereShell, kUniformBox };

struct SyntheticSceneSpec {
  int count = 1;
  Layout layout = Layout::kUniformBox;
  /// Half-width of the box for grid/uniform-box, shell radius for sphere-shell.
  float extent = 1.0f;
  float scale_min = 0.02f;
  float scale_max = 0.08f;
  float opacity_min = 0.3f;
  float opacity_max = 0.9f;
  int sh_degree = 1;
  std::uint64_t seed = 0;
};

Layout parse_layout(const std::string& name);
const char* to_string(Layout layout);

GaussianScene generate_synthetic_scene(const SyntheticSceneSpec& spec);

// --- Evaluation ----------------------------------------------------------

/// Sigma = R S S^T R^T.
Eigen::Matrix3f covariance_from_params(const Eigen::Quaternionf& rotation,
                                       const Eigen::Vector3f& scale);

/// View-dependent color, offset by +0.5 and clamped to [0,1] per channel.
/// Throws DegreeMismatch unless sh.size() == sh_coeff_count(degree).
Eigen::Vector3f eval_sh(std::span<const float> sh, int degree, const Eigen::Vector3f& dir);

/// Same as eval_sh without the final clamp.
Eigen::Vector3f eval_sh_unclamped(std::span<const float> sh, int degree,
                                  const Eigen::Vector3f& dir);

namespace sh_constants {
inline constexpr float kC0 = 0.28209479177387814f;
inline constexpr float kC1 = 0.4886025119029199f;
inline constexpr float kC2[5] = {1.0925484305920792f, -1.0925484305920792f,
                                 0.31539156525252005f, -1.0925484305920792f,
                                 0.5462742152960396f};
inline constexpr float kC3[7] = {-0.5900435899266435f, 2.890611442640554f,
                                 -0.4570457994644658f, 0.3731763325901154f,
                                 -0.4570457994644658f, 1.445305721320277f,
                                 -0.5900435899266435f};
}  // namespace sh_constants

}  // namespace lfr::scene
