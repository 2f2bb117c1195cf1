// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/display.hpp"
#include "lfr/error.hpp"

namespace lfr::display {

InterlacedImage interlace(std::span<const Image> views, const ViewpointMatrix& matrix) {
  const DisplayConfig& c = matrix.config();
  if (views.size() != static_cast<std::size_t>(c.num_views)) {
    throw Error(ErrorCode::kCountMismatch, "expected " + std::to_string(c.num_views) +
                                               " views, got " + std::to_string(views.size()));
  }
  for (const auto& v : views) {
    if (v.width != c.width || v.height != c.height || v.size() != c.num_subpixels()) {
      throw Error(ErrorCode::kSizeMismatch, "view image does not match the panel");
    }
  }
  InterlacedImage out{c, Image(c.width, c.height)};
  const auto n = static_cast<std::ptrdiff_t>(c.num_subpixels());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) out.pixels.data[s] = views[matrix[s]].data[s];
  return out;
}

MaskedImage deinterlace(const InterlacedImage& img, const ViewpointMatrix& matrix, int view) {
  const DisplayConfig& c = matrix.config();
  if (view < 0 || view >= c.num_views) {
    throw Error(ErrorCode::kViewOutOfRange, "view " + std::to_string(view) + " not in [0, " +
                                                std::to_string(c.num_views) + ")");
  }
  if (img.pixels.width != c.width || img.pixels.height != c.height) {
    throw Error(ErrorCode::kSizeMismatch, "interlaced image does not match the panel");
  }
  MaskedImage out{Image(c.width, c.height), std::vector<std::uint8_t>(c.num_subpixels(), 0), 0};
  for (std::size_t s = 0; s < c.num_subpixels(); ++s) {
    if (matrix[s] == view) {
      out.mask[s] = 1;
      out.image.data[s] = img.pixels.data[s];
      ++out.count;
    }
  }
  return out;
}

}  // namespace lfr::display
