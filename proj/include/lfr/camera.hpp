// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lfr/scene.hpp"

namespace lfr::camera {

/// Pinhole camera. `rotation`/`translation` map world to camera space
/// (x right, y down, z forward). Pixel centers sit at half-integers.
struct Camera {
  Eigen::Matrix3f rotation = Eigen::Matrix3f::Identity();
  Eigen::Vector3f translation = Eigen::Vector3f::Zero();
  float fx = 1.0f;
  float fy = 1.0f;
  float cx = 0.0f;
  float cy = 0.0f;
  int width = 1;
  int height = 1;
  float znear = 0.01f;

  Eigen::Vector3f position() const { return -(rotation.transpose() * translation); }
  Eigen::Vector3f to_camera(const Eigen::Vector3f& world) const {
    return rotation * world + translation;
  }

  /// Throws InvalidSpec.
  void validate() const;
};

struct RigSpec {
  int num_views = 1;
  double angular_range_deg = 0.0;
  double orbit_radius = 4.0;
  Eigen::Vector3d look_at = Eigen::Vector3d::Zero();
  Eigen::Vector3d up = Eigen::Vector3d(0.0, 1.0, 0.0);
  double fov_y_deg = 45.0;
  int width = 1;
  int height = 1;

  void validate() const;
};

/// N cameras on a horizontal arc around look_at, all aimed at it. View 0 is
/// at the most negative arc angle; the arc is centered on the home direction
/// (the world axis e_z projected off `up`).
std::vector<Camera> generate_orbit_rig(const RigSpec& spec);

struct Rig {
  std::vector<Camera> cameras;
  std::optional<RigSpec> generator;
};

/// JSON rig files: {"schema_version", "cameras":[...], "generator":{...}}.
/// When only the generator section is present the cameras are regenerated.
Rig load_rig(const std::filesystem::path& path);
void save_rig(const Rig& rig, const std::filesystem::path& path);

/// Contiguous partition of the N views into K clusters of `cluster_size`;
/// the last cluster is padded with copies of view N-1.
class Clustering {
 public:
  Clustering() = default;
  /// Throws InvalidSize unless num_views >= 1 and cluster_size >= 1.
  Clustering(int num_views, int cluster_size);

  int num_views() const { return num_views_; }
  int cluster_size() const { return cluster_size_; }
  int num_clusters() const { return num_clusters_; }
  int cluster_of(int view) const { return view / cluster_size_; }

  /// View at local index floor(|V_k|/2), resolved through padding.
  int representative(int k) const;

  /// The cluster_size view ids of cluster k, padded entries repeat N-1.
  std::vector<int> padded_views(int k) const;

  /// First real view and one past the last real view of cluster k.
  int begin(int k) const { return k * cluster_size_; }
  int end(int k) const;

 private:
  int num_views_ = 1;
  int cluster_size_ = 1;
  int num_clusters_ = 1;
};

Clustering cluster_views(int num_views, int cluster_size);

struct MeanProjection {
  Eigen::Vector2f mean2d = Eigen::Vector2f::Zero();
  float depth = 0.0f;
  bool visible = false;
};

/// Pinhole projection of a world point; visible iff camera-space z >= znear.
MeanProjection project_mean(const Camera& camera, const Eigen::Vector3f& mean);

/// Inverse 2D covariance as a*dx^2 + 2b*dx*dy + c*dy^2 plus the tile-culling
/// extent.
struct Conic2D {
  float a = 0.0f;
  float b = 0.0f;
  float c = 0.0f;
  /// Dilated 2D covariance (xx, xy, yy), kept for bounding boxes.
  float cov_xx = 0.0f;
  float cov_xy = 0.0f;
  float cov_yy = 0.0f;
  /// Quadratic-form level where eff_opacity * exp(-q/2) reaches 1/255.
  float cutoff_q = 0.0f;
  /// Major-axis extent in pixels at the cutoff level.
  float radius = 0.0f;
  /// sqrt(det(Sigma2D) / det(Sigma2D + 0.3 I)).
  float compensation = 1.0f;
};

struct SharedProjection {
  Conic2D conic;
  float depth = 0.0f;
  float eff_opacity = 0.0f;
  Eigen::Vector3f color = Eigen::Vector3f::Zero();

  /// False when the splat cannot reach 1/255 anywhere.
  bool contributes() const { return conic.cutoff_q > 0.0f; }
};

inline constexpr float kLowPassDilation = 0.3f;
inline constexpr float kAlphaThreshold = 1.0f / 255.0f;

/// EWA projection of covariance, camera-space depth and SH color.
/// Precondition: the mean is visible from the camera. Throws
/// DegenerateCovariance on a non-positive or non-finite determinant.
SharedProjection project_shared(const Camera& camera, const scene::Gaussian3D& gaussian,
                                int sh_degree);

}  // namespace lfr::camera
