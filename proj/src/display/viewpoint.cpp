// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "lfr/display.hpp"
#include "lfr/error.hpp"

namespace lfr::display {

void DisplayConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (width < 1 || height < 1) fail("panel size must be positive");
  if (num_views < 1 || num_views > std::numeric_limits<ViewIndex>::max()) {
    fail("num_views must be in [1, 65535]");
  }
  if (tile_size < 1) fail("tile_size must be >= 1");
  if (!(line_count > 0.0) || !std::isfinite(line_count)) fail("line_count must be positive");
  if (!std::isfinite(tilt) || std::abs(tilt) >= std::numbers::pi / 2) {
    fail("tilt must be finite and within (-90, 90) degrees");
  }
  if (!std::isfinite(lens_offset)) fail("lens offset must be finite");
  if (num_subpixels() > std::numeric_limits<std::uint32_t>::max()) fail("panel too large");
}

DisplayConfig parse_display_config(std::string_view text) {
  DisplayConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      std::size_t used = 0;
      if (key == "width") {
        c.width = std::stoi(value, &used);
      } else if (key == "height") {
        c.height = std::stoi(value, &used);
      } else if (key == "tilt_deg") {
        c.tilt = tilt_from_degrees(std::stod(value, &used));
      } else if (key == "line_count") {
        c.line_count = std::stod(value, &used);
      } else if (key == "offset") {
        c.lens_offset = std::stod(value, &used);
      } else if (key == "views") {
        c.num_views = std::stoi(value, &used);
      } else if (key == "tile") {
        c.tile_size = std::stoi(value, &used);
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  c.validate();
  return c;
}

DisplayConfig load_display_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_display_config(ss.str());
}

double tilt_from_degrees(double degrees) { return degrees * std::numbers::pi / 180.0; }

double tilt_to_degrees(double radians) {
  const double guess = radians * 180.0 / std::numbers::pi;
  double up = guess, down = guess;
  for (int step = 0; step < 64; ++step) {
    if (tilt_from_degrees(up) == radians) return up;
    if (tilt_from_degrees(down) == radians) return down;
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
  }
  return guess;
}

std::string format_display_config(const DisplayConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "width=" << c.width << "\nheight=" << c.height
      << "\ntilt_deg=" << tilt_to_degrees(c.tilt) << "\nline_count=" << c.line_count
      << "\noffset=" << c.lens_offset << "\nviews=" << c.num_views << "\ntile=" << c.tile_size
      << "\n";
  return out.str();
}

int viewpoint_index(const DisplayConfig& config, int x, int y, int u) {
  const double lx = config.line_count;
  const double d_offset =
      3.0 * x + u + 3.0 * y * std::tan(config.tilt) - config.lens_offset;
  double x_offset = std::fmod(d_offset, lx);
  if (x_offset < 0.0) x_offset += lx;
  // x_offset + lx can round up to lx itself; the true value is just below it.
  const auto j = static_cast<int>(std::floor(config.num_views * (x_offset / lx)));
  return std::clamp(j, 0, config.num_views - 1);
}

ViewpointMatrix build_viewpoint_matrix(const DisplayConfig& config) {
  config.validate();
  std::vector<ViewIndex> data(config.num_subpixels());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      for (int u = 0; u < 3; ++u) {
        data[subpixel_index(config, x, y, u)] =
            static_cast<ViewIndex>(viewpoint_index(config, x, y, u));
      }
    }
  }
  return ViewpointMatrix(config, std::move(data));
}

void write_viewpoint_csv(const ViewpointMatrix& matrix, std::ostream& out) {
  const auto& c = matrix.config();
  std::string row;
  for (int y = 0; y < c.height; ++y) {
    row.clear();
    for (int x = 0; x < c.width; ++x) {
      for (int u = 0; u < 3; ++u) {
        if (x > 0 || u > 0) row.push_back(',');
        row += std::to_string(matrix.at(x, y, u));
      }
    }
    row.push_back('\n');
    out << row;
  }
}

std::vector<std::uint8_t> viewpoint_false_color(const ViewpointMatrix& matrix) {
  const auto& c = matrix.config();
  std::vector<std::uint8_t> rgb(c.num_subpixels() * 3);
  for (std::size_t s = 0; s < c.num_subpixels(); ++s) {
    // HSV with full saturation/value; hue spans [0, 300) degrees so the
    // first and last views stay distinguishable.
    const double h = c.num_views > 1 ? 5.0 * matrix[s] / (c.num_views - 1) : 0.0;
    const int sector = std::min(static_cast<int>(h), 4);
    const double f = h - sector;
    const auto up = static_cast<std::uint8_t>(std::lround(255.0 * f));
    const auto down = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - f)));
    std::uint8_t r = 0, g = 0, b = 0;
    switch (sector) {
      case 0: r = 255; g = up; break;
      case 1: r = down; g = 255; break;
      case 2: g = 255; b = up; break;
      case 3: g = down; b = 255; break;
      default: r = up; b = 255; break;
    }
    rgb[3 * s] = r;
    rgb[3 * s + 1] = g;
    rgb[3 * s + 2] = b;
  }
  return rgb;
}

}  // namespace lfr::display
