// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lfr {

using Rgb = std::array<float, 3>;

/// Row-major, channel-minor RGB float image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  static Image filled(int w, int h, const Rgb& color) {
    Image img(w, h);
    for (std::size_t p = 0; p < img.data.size(); p += 3) {
      img.data[p] = color[0];
      img.data[p + 1] = color[1];
      img.data[p + 2] = color[2];
    }
    return img;
  }

  std::size_t index(int x, int y, int u) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + u;
  }
  float& at(int x, int y, int u) { return data[index(x, y, u)]; }
  float at(int x, int y, int u) const { return data[index(x, y, u)]; }
  std::size_t size() const { return data.size(); }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

}  // namespace lfr
