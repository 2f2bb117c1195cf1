// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <fstream>
#include <functional>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "desk.hpp"
#include "lfr/camera.hpp"
#include "lfr/error.hpp"
#include "lfr/splat_math.hpp"

namespace lfr::camera {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

RigSpec spec(int n, double range) {
  RigSpec s;
  s.num_views = n;
  s.angular_range_deg = range;
  s.orbit_radius = 3.0;
  s.look_at = {0.2, -0.1, 0.5};
  s.width = 64;
  s.height = 48;
  return s;
}

TEST(Rig, SingleCameraLooksAtTarget) {
  const auto s = spec(1, 30);
  const auto cams = generate_orbit_rig(s);
  ASSERT_EQ(cams.size(), 1u);
  const Eigen::Vector3d pos = cams[0].position().cast<double>();
  const Eigen::Vector3d forward = cams[0].rotation.row(2).transpose().cast<double>();
  EXPECT_LE((forward - (s.look_at - pos).normalized()).norm(), 1e-6);
  // Arc centerline: along +z from the target.
  EXPECT_LE(std::abs((pos - s.look_at).normalized().z() - 1.0), 1e-6);
}

TEST(Rig, EqualAngularSpacing) {
  const auto s = spec(3, 2.0);
  const auto cams = generate_orbit_rig(s);
  for (int j = 0; j + 1 < 3; ++j) {
    const Eigen::Vector3d a = cams[j].position().cast<double>() - s.look_at;
    const Eigen::Vector3d b = cams[j + 1].position().cast<double>() - s.look_at;
    EXPECT_NEAR(std::acos(a.normalized().dot(b.normalized())) / kDeg, 1.0, 1e-3);
  }
}

TEST(Rig, RadiusIntrinsicsAndOrthonormality) {
  const auto s = spec(9, 53);
  const auto cams = generate_orbit_rig(s);
  const double fy = s.height / (2.0 * std::tan(s.fov_y_deg * kDeg / 2));
  for (const auto& c : cams) {
    EXPECT_NEAR((c.position().cast<double>() - s.look_at).norm(), s.orbit_radius, 1e-5);
    EXPECT_NEAR(c.fy, fy, 1e-4);
    EXPECT_EQ(c.fx, c.fy);
    EXPECT_EQ(c.cx, 32.0f);
    EXPECT_EQ(c.cy, 24.0f);
    EXPECT_NO_THROW(c.validate());
    // Horizontal parallax only: every camera at the target's height.
    EXPECT_NEAR(c.position().y(), s.look_at.y(), 1e-5);
  }
}

TEST(Rig, MirrorSymmetry) {
  const auto s = spec(8, 40);
  const auto cams = generate_orbit_rig(s);
  // The bisecting plane is x = look_at.x (arc centered on +z, up = +y).
  for (int j = 0; j < 8; ++j) {
    const Eigen::Vector3f a = cams[j].position(), b = cams[7 - j].position();
    EXPECT_NEAR(a.x() - s.look_at.x(), -(b.x() - s.look_at.x()), 1e-5);
    EXPECT_NEAR(a.y(), b.y(), 1e-5);
    EXPECT_NEAR(a.z(), b.z(), 1e-5);
  }
}

TEST(Rig, InvalidSpec) {
  for (auto mutate : std::vector<std::function<void(RigSpec&)>>{
           [](RigSpec& s) { s.num_views = 0; }, [](RigSpec& s) { s.angular_range_deg = -1; },
           [](RigSpec& s) { s.orbit_radius = 0; }, [](RigSpec& s) { s.fov_y_deg = 180; }}) {
    auto s = spec(3, 10);
    mutate(s);
    try {
      generate_orbit_rig(s);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidSpec);
    }
  }
}

TEST(Rig, JsonRoundTrip) {
  test::TempDir dir;
  const auto s = spec(5, 12);
  const Rig rig{generate_orbit_rig(s), s};
  save_rig(rig, dir / "rig.json");
  const Rig back = load_rig(dir / "rig.json");
  ASSERT_EQ(back.cameras.size(), 5u);
  ASSERT_TRUE(back.generator.has_value());
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(back.cameras[j].rotation, rig.cameras[j].rotation);
    EXPECT_EQ(back.cameras[j].translation, rig.cameras[j].translation);
    EXPECT_EQ(back.cameras[j].fx, rig.cameras[j].fx);
  }
  std::ofstream(dir / "gen.json") << R"({"schema_version":1,"generator":{"num_views":5,
      "angular_range_deg":12,"orbit_radius":3,"look_at":[0.2,-0.1,0.5],"up":[0,1,0],
      "fov_y_deg":45,"width":64,"height":48}})";
  const Rig gen = load_rig(dir / "gen.json");
  ASSERT_EQ(gen.cameras.size(), 5u);
  EXPECT_EQ(gen.cameras[3].translation, rig.cameras[3].translation);
}

TEST(Clustering, SeventyOneViewsInClustersOfEighteen) {
  const Clustering c(71, 18);
  EXPECT_EQ(c.num_clusters(), 4);
  EXPECT_EQ(c.representative(0), 9);
  const auto last = c.padded_views(3);
  ASSERT_EQ(last.size(), 18u);
  for (int l = 0; l < 17; ++l) EXPECT_EQ(last[l], 54 + l);
  EXPECT_EQ(last[17], 70);
  EXPECT_EQ(c.begin(3), 54);
  EXPECT_EQ(c.end(3), 71);
}

TEST(Clustering, SizeOneAndSingleCluster) {
  const Clustering one(8, 1);
  EXPECT_EQ(one.num_clusters(), 8);
  for (int j = 0; j < 8; ++j) EXPECT_EQ(one.representative(j), j);
  const Clustering all(8, 8);
  EXPECT_EQ(all.num_clusters(), 1);
  EXPECT_EQ(all.representative(0), 4);
}

TEST(Clustering, PartitionProperty) {
  for (int n = 1; n <= 40; ++n) {
    for (int size = 1; size <= 12; ++size) {
      const Clustering c(n, size);
      EXPECT_EQ(c.num_clusters(), (n + size - 1) / size);
      std::vector<int> seen(n, 0);
      for (int k = 0; k < c.num_clusters(); ++k) {
        for (int j = c.begin(k); j < c.end(k); ++j) {
          ++seen[j];
          EXPECT_EQ(c.cluster_of(j), k);
        }
        const int rep = c.representative(k);
        EXPECT_EQ(rep, std::min(k * size + size / 2, n - 1));
      }
      for (int v : seen) EXPECT_EQ(v, 1);
    }
  }
}

TEST(Clustering, InvalidSize) {
  EXPECT_THROW(Clustering(0, 1), Error);
  EXPECT_THROW(Clustering(4, 0), Error);
}

Camera axis_camera() {
  Camera c;
  c.fx = 100;
  c.fy = 120;
  c.cx = 50;
  c.cy = 40;
  c.width = 100;
  c.height = 80;
  return c;
}

TEST(ProjectMean, PinholeExamples) {
  const Camera c = axis_camera();
  const auto on_axis = project_mean(c, {0, 0, 5});
  EXPECT_TRUE(on_axis.visible);
  EXPECT_EQ(on_axis.mean2d, Eigen::Vector2f(50, 40));
  EXPECT_FALSE(project_mean(c, {0, 0, -1}).visible);
  const auto p = project_mean(c, {1, 0, 2});
  EXPECT_FLOAT_EQ(p.mean2d.x(), 100.0f);
  EXPECT_FLOAT_EQ(p.depth, 2.0f);
}

scene::Gaussian3D isotropic(const Eigen::Vector3f& mean, float s, float opacity = 0.8f) {
  scene::Gaussian3D g;
  g.mean = mean;
  g.scale = {s, s, s};
  g.opacity = opacity;
  return g;
}

TEST(ProjectShared, IsotropicOnAxisClosedForm) {
  const Camera c = axis_camera();
  const float s = 0.05f, d = 2.0f;
  const auto p = project_shared(c, isotropic({0, 0, d}, s), 0);
  const double sx = std::pow(100.0 * s / d, 2) + 0.3, sy = std::pow(120.0 * s / d, 2) + 0.3;
  EXPECT_NEAR(p.conic.cov_xx, sx, 1e-4);
  EXPECT_NEAR(p.conic.cov_yy, sy, 1e-4);
  EXPECT_NEAR(p.conic.cov_xy, 0.0, 1e-6);
  EXPECT_NEAR(p.conic.a, 1.0 / sx, 1e-6);
  EXPECT_NEAR(p.conic.c, 1.0 / sy, 1e-6);
  EXPECT_EQ(p.depth, d);
  const double comp = std::sqrt((sx - 0.3) * (sy - 0.3) / (sx * sy));
  EXPECT_NEAR(p.conic.compensation, comp, 1e-5);
  EXPECT_NEAR(p.eff_opacity, 0.8 * comp, 1e-5);
  // The cutoff is where the falloff reaches 1/255.
  EXPECT_NEAR(p.eff_opacity * std::exp(-0.5 * p.conic.cutoff_q), 1.0 / 255.0, 1e-6);
  EXPECT_NEAR(p.conic.radius, std::sqrt(sy * p.conic.cutoff_q), 1e-3);
}

TEST(ProjectShared, DepthAndDegreeZeroColor) {
  const auto rig = generate_orbit_rig(spec(5, 60));
  scene::Gaussian3D g = isotropic({0.1f, 0.2f, 0.3f}, 0.1f);
  g.sh[0] = 0.3f;
  g.sh[1] = -0.2f;
  g.sh[2] = 0.7f;
  const auto first = project_shared(rig[0], g, 0);
  for (const auto& cam : rig) {
    const auto p = project_shared(cam, g, 0);
    EXPECT_EQ(p.depth, cam.to_camera(g.mean).z());
    EXPECT_EQ(p.color, first.color);
  }
}

TEST(ProjectShared, PositiveDefiniteForRandomInputs) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> u(-1, 1), s(1e-4f, 1.0f);
  const auto rig = generate_orbit_rig(spec(4, 90));
  for (int n = 0; n < 500; ++n) {
    scene::Gaussian3D g;
    g.mean = {u(rng), u(rng), u(rng)};
    g.rotation = Eigen::Quaternionf(u(rng), u(rng), u(rng), u(rng)).normalized();
    g.scale = {s(rng), s(rng) * 0.01f, s(rng)};
    g.opacity = 0.5f;
    for (const auto& cam : rig) {
      if (!project_mean(cam, g.mean).visible) continue;
      const auto p = project_shared(cam, g, 0);
      EXPECT_GT(p.conic.a, 0.0f);
      EXPECT_GT(p.conic.c, 0.0f);
      EXPECT_GT(p.conic.a * p.conic.c - p.conic.b * p.conic.b, 0.0f);
    }
  }
}

TEST(ProjectShared, RadiusInvariantUnderRollAboutAxis) {
  Camera a = axis_camera();
  a.fy = a.fx;
  a.cx = a.cy = 50;
  a.height = 100;
  scene::Gaussian3D g;
  g.mean = {0, 0, 3};
  g.scale = {0.2f, 0.05f, 0.1f};
  g.rotation = Eigen::Quaternionf(Eigen::AngleAxisf(0.4f, Eigen::Vector3f(1, 2, 3).normalized()));
  g.opacity = 0.9f;
  const auto ref = project_shared(a, g, 0);
  for (float roll : {0.3f, 1.1f, 2.5f}) {
    Camera b = a;
    b.rotation = Eigen::AngleAxisf(roll, Eigen::Vector3f::UnitZ()).toRotationMatrix();
    const auto p = project_shared(b, g, 0);
    EXPECT_NEAR(p.conic.radius, ref.conic.radius, 1e-4f * ref.conic.radius);
  }
}

TEST(ProjectShared, FaintSplatDoesNotContribute) {
  const auto p = project_shared(axis_camera(), isotropic({0, 0, 2}, 0.05f, 0.003f), 0);
  EXPECT_FALSE(p.contributes());
}

TEST(ProjectShared, OverflowIsDegenerate) {
  try {
    project_shared(axis_camera(), isotropic({0, 0, 2}, 1e30f), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCovariance);
  }
}

TEST(Camera, ValidateRejectsBadPose) {
  Camera c = axis_camera();
  c.rotation(0, 0) = 2.0f;
  EXPECT_THROW(c.validate(), Error);
  c = axis_camera();
  c.fx = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(SplatMath, ExpNegAccuracy) {
  EXPECT_EQ(splat::exp_neg(0.0f), 1.0f);
  EXPECT_EQ(splat::exp_neg(-100.0f), 0.0f);
  double worst = 0.0;
  for (float x = -87.0f; x <= 0.0f; x += 0.00137f) {
    const double want = std::exp(static_cast<double>(x));
    worst = std::max(worst, std::abs(splat::exp_neg(x) - want) / want);
  }
  EXPECT_LT(worst, 3e-7);
}

}  // namespace
}  // namespace lfr::camera
