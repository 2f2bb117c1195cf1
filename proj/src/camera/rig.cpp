// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <numbers>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "lfr/camera.hpp"
#include "lfr/error.hpp"

namespace lfr::camera {

using nlohmann::json;

void Camera::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (!rotation.allFinite() || !translation.allFinite()) fail("camera pose must be finite");
  const Eigen::Matrix3f rrt = rotation * rotation.transpose();
  if ((rrt - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() > 1e-5f) {
    fail("camera rotation is not orthonormal");
  }
  if (!(fx > 0.0f) || !(fy > 0.0f)) fail("focal lengths must be positive");
  if (!(znear > 0.0f)) fail("znear must be positive");
  if (width < 1 || height < 1) fail("image size must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) fail("principal point must be finite");
}

void RigSpec::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (num_views < 1) fail("num_views must be >= 1");
  if (!(angular_range_deg >= 0.0) || !(angular_range_deg < 360.0)) {
    fail("angular_range must be in [0, 360)");
  }
  if (!(orbit_radius > 0.0)) fail("orbit_radius must be positive");
  if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0)) fail("fov_y must be in (0, 180)");
  if (!look_at.allFinite() || !up.allFinite() || up.norm() < 1e-9) fail("bad look_at/up");
  if (width < 1 || height < 1) fail("image size must be positive");
}

std::vector<Camera> generate_orbit_rig(const RigSpec& spec) {
  spec.validate();
  const Eigen::Vector3d up = spec.up.normalized();
  Eigen::Vector3d home = Eigen::Vector3d::UnitZ() - up.z() * up;
  if (home.norm() < 1e-6) home = Eigen::Vector3d::UnitX() - up.x() * up;
  home.normalize();
  const Eigen::Vector3d side = up.cross(home).normalized();

  const double range = spec.angular_range_deg * std::numbers::pi / 180.0;
  const double fy = spec.height / (2.0 * std::tan(spec.fov_y_deg * std::numbers::pi / 360.0));

  std::vector<Camera> cameras(spec.num_views);
  for (int j = 0; j < spec.num_views; ++j) {
    const double theta =
        spec.num_views > 1 ? -0.5 * range + j * range / (spec.num_views - 1) : 0.0;
    const Eigen::Vector3d pos =
        spec.look_at + spec.orbit_radius * (std::cos(theta) * home + std::sin(theta) * side);
    const Eigen::Vector3d forward = (spec.look_at - pos).normalized();
    const Eigen::Vector3d right = forward.cross(up).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    Eigen::Matrix3d r;
    r.row(0) = right.transpose();
    r.row(1) = down.transpose();
    r.row(2) = forward.transpose();

    Camera& cam = cameras[j];
    cam.rotation = r.cast<float>();
    cam.translation = (-(r * pos)).cast<float>();
    cam.fx = cam.fy = static_cast<float>(fy);
    cam.cx = 0.5f * spec.width;
    cam.cy = 0.5f * spec.height;
    cam.width = spec.width;
    cam.height = spec.height;
  }
  return cameras;
}

namespace {

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kInvalidSpec, "expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json spec_json(const RigSpec& s) {
  return {{"num_views", s.num_views},         {"angular_range_deg", s.angular_range_deg},
          {"orbit_radius", s.orbit_radius},   {"look_at", vec_json(s.look_at)},
          {"up", vec_json(s.up)},             {"fov_y_deg", s.fov_y_deg},
          {"width", s.width},                 {"height", s.height}};
}

RigSpec spec_from(const json& j) {
  RigSpec s;
  s.num_views = j.at("num_views").get<int>();
  s.angular_range_deg = j.at("angular_range_deg").get<double>();
  s.orbit_radius = j.at("orbit_radius").get<double>();
  s.look_at = vec_from(j.at("look_at"));
  s.up = vec_from(j.at("up"));
  s.fov_y_deg = j.at("fov_y_deg").get<double>();
  s.width = j.at("width").get<int>();
  s.height = j.at("height").get<int>();
  return s;
}

}  // namespace

Rig load_rig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Rig rig;
  try {
    const json doc = json::parse(in);
    if (doc.contains("generator")) rig.generator = spec_from(doc.at("generator"));
    if (doc.contains("cameras")) {
      for (const auto& c : doc.at("cameras")) {
        Camera cam;
        const auto& r = c.at("rotation");
        if (r.size() != 9) throw Error(ErrorCode::kInvalidSpec, "rotation needs 9 entries");
        for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r[i].get<float>();
        const auto& t = c.at("translation");
        if (t.size() != 3) throw Error(ErrorCode::kInvalidSpec, "translation needs 3 entries");
        for (int i = 0; i < 3; ++i) cam.translation[i] = t[i].get<float>();
        cam.fx = c.at("fx").get<float>();
        cam.fy = c.at("fy").get<float>();
        cam.cx = c.at("cx").get<float>();
        cam.cy = c.at("cy").get<float>();
        cam.width = c.at("width").get<int>();
        cam.height = c.at("height").get<int>();
        cam.znear = c.value("znear", 0.01f);
        cam.validate();
        rig.cameras.push_back(cam);
      }
    } else if (rig.generator) {
      rig.cameras = generate_orbit_rig(*rig.generator);
    } else {
      throw Error(ErrorCode::kInvalidSpec, "rig file has neither cameras nor generator");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, path.string() + ": " + e.what());
  }
  return rig;
}

void save_rig(const Rig& rig, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = 1;
  json cams = json::array();
  for (const auto& c : rig.cameras) {
    json r = json::array();
    for (int i = 0; i < 9; ++i) r.push_back(c.rotation(i / 3, i % 3));
    cams.push_back({{"rotation", r},
                    {"translation", {c.translation.x(), c.translation.y(), c.translation.z()}},
                    {"fx", c.fx},
                    {"fy", c.fy},
                    {"cx", c.cx},
                    {"cy", c.cy},
                    {"width", c.width},
                    {"height", c.height},
                    {"znear", c.znear}});
  }
  doc["cameras"] = std::move(cams);
  if (rig.generator) doc["generator"] = spec_json(*rig.generator);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace lfr::camera
