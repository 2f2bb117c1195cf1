// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfr/camera.hpp"
#include "lfr/display.hpp"
#include "lfr/image.hpp"
#include "lfr/scene.hpp"

namespace lfr::oracle {

/// Conventional single-view tile renderer: every attribute is projected from
/// this camera, keys are (tile, depth), and each pixel is blended with the
/// same numerics as the light-field pipeline.
Image render_view_fullframe(const scene::GaussianScene& scene, const camera::Camera& camera,
                            const Rgb& background, int tile_size = 16);

/// Renders all N views at panel resolution and interlaces them. When
/// `views_out` is non-null the per-view images are returned through it.
display::InterlacedImage render_lightfield_fullframe(const scene::GaussianScene& scene,
                                                     const display::DisplayConfig& config,
                                                     std::span<const camera::Camera> rig,
                                                     const Rgb& background,
                                                     std::vector<Image>* views_out = nullptr);

struct ViewMetrics {
  int view = 0;
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::size_t masked_count = 0;
};

struct ImageMetricsReport {
  double mse = 0.0;
  double psnr_db = 0.0;  // +inf for identical inputs
  double ssim = 0.0;
  std::size_t count = 0;
  std::vector<ViewMetrics> per_view;
};

double psnr_from_mse(double mse);

/// PSNR and SSIM (11x11 Gaussian window, sigma 1.5, C1 = 0.01^2,
/// C2 = 0.03^2, channel average) over subpixels selected by `mask`
/// (one entry per subpixel; empty means everything). Throws SizeMismatch
/// and EmptyMask.
ImageMetricsReport image_metrics(const Image& a, const Image& b,
                                 std::span<const std::uint8_t> mask = {});

/// Whole-panel metrics plus a per-view breakdown over each view's subpixels.
ImageMetricsReport lightfield_metrics(const display::InterlacedImage& a,
                                      const display::InterlacedImage& b,
                                      const display::ViewpointMatrix& matrix);

/// {"schema_version", "psnr_db" ("inf" sentinel), "ssim", "mse", "count",
///  "per_view": [...]}
nlohmann::json to_json(const ImageMetricsReport& report);

}  // namespace lfr::oracle
