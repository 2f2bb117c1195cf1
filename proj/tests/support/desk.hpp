// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lfr/camera.hpp"
#include "lfr/display.hpp"
#include "lfr/scene.hpp"

// Desk-scale fixtures shared by the unit and acceptance suites.
namespace lfr::test {

inline scene::GaussianScene desk_scene(int count = 2000, std::uint64_t seed = 7) {
  scene::SyntheticSceneSpec spec;
  spec.count = count;
  spec.layout = scene::Layout::kUniformBox;
  spec.extent = 1.0f;
  spec.sh_degree = 1;
  spec.seed = seed;
  return scene::generate_synthetic_scene(spec);
}

inline display::DisplayConfig desk_display(int width = 192, int height = 108, int views = 8) {
  display::DisplayConfig c;
  c.width = width;
  c.height = height;
  c.tilt = 8.0 * std::numbers::pi / 180.0;
  c.line_count = 7.3;
  c.lens_offset = 1.5;
  c.num_views = views;
  c.tile_size = 16;
  return c;
}

inline camera::RigSpec desk_rig_spec(const display::DisplayConfig& c, double range_deg) {
  camera::RigSpec spec;
  spec.num_views = c.num_views;
  spec.angular_range_deg = range_deg;
  spec.orbit_radius = 4.0;
  spec.fov_y_deg = 45.0;
  spec.width = c.width;
  spec.height = c.height;
  return spec;
}

inline std::vector<camera::Camera> desk_rig(const display::DisplayConfig& c, double range_deg) {
  return camera::generate_orbit_rig(desk_rig_spec(c, range_deg));
}

/// Removes the directory tree on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lfr-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace lfr::test
