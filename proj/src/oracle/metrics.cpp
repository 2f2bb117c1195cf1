// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <limits>

#include "lfr/error.hpp"
#include "lfr/oracle.hpp"

namespace lfr::oracle {

namespace {

constexpr int kRadius = 5;  // 11x11 window
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, 2 * kRadius + 1> gaussian_window() {
  std::array<double, 2 * kRadius + 1> w{};
  for (int d = -kRadius; d <= kRadius; ++d) w[d + kRadius] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
  return w;
}

// Separable Gaussian filter of one channel; the window is truncated at the
// borders and renormalized over the taps that fall inside the image.
std::vector<double> filter(const std::vector<double>& src, int w, int h) {
  static const auto kw = gaussian_window();
  std::vector<double> tmp(src.size()), out(src.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0, norm = 0.0;
      for (int d = std::max(-kRadius, -x); d <= std::min(kRadius, w - 1 - x); ++d) {
        sum += kw[d + kRadius] * src[static_cast<std::size_t>(y) * w + x + d];
        norm += kw[d + kRadius];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = sum / norm;
    }
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0, norm = 0.0;
      for (int d = std::max(-kRadius, -y); d <= std::min(kRadius, h - 1 - y); ++d) {
        sum += kw[d + kRadius] * tmp[static_cast<std::size_t>(y + d) * w + x];
        norm += kw[d + kRadius];
      }
      out[static_cast<std::size_t>(y) * w + x] = sum / norm;
    }
  }
  return out;
}

// Mean SSIM of channel u over the selected pixels.
double channel_ssim(const Image& a, const Image& b, int u, std::span<const std::uint8_t> mask,
                    std::size_t& selected) {
  const int w = a.width, h = a.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> xa(n), xb(n), aa(n), bb(n), ab(n);
  for (std::size_t p = 0; p < n; ++p) {
    xa[p] = a.data[3 * p + u];
    xb[p] = b.data[3 * p + u];
    aa[p] = xa[p] * xa[p];
    bb[p] = xb[p] * xb[p];
    ab[p] = xa[p] * xb[p];
  }
  const auto ma = filter(xa, w, h), mb = filter(xb, w, h);
  const auto saa = filter(aa, w, h), sbb = filter(bb, w, h), sab = filter(ab, w, h);
  double total = 0.0;
  selected = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!mask.empty() && !mask[3 * p + u]) continue;
    const double va = saa[p] - ma[p] * ma[p];
    const double vb = sbb[p] - mb[p] * mb[p];
    const double cov = sab[p] - ma[p] * mb[p];
    total += ((2.0 * ma[p] * mb[p] + kC1) * (2.0 * cov + kC2)) /
             ((ma[p] * ma[p] + mb[p] * mb[p] + kC1) * (va + vb + kC2));
    ++selected;
  }
  return total;
}

}  // namespace

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

ImageMetricsReport image_metrics(const Image& a, const Image& b,
                                 std::span<const std::uint8_t> mask) {
  if (!a.same_shape(b) || a.size() != b.size()) {
    throw Error(ErrorCode::kSizeMismatch, "images differ in size");
  }
  if (!mask.empty() && mask.size() != a.size()) {
    throw Error(ErrorCode::kSizeMismatch, "mask does not match the image");
  }
  ImageMetricsReport report;
  // Per-row partial sums keep the reduction order fixed for any thread count.
  std::vector<double> row_sum(a.height, 0.0);
  std::vector<std::size_t> row_count(a.height, 0);
  const std::size_t row_len = static_cast<std::size_t>(a.width) * 3;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < a.height; ++y) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = y * row_len; s < (y + 1) * row_len; ++s) {
      if (!mask.empty() && !mask[s]) continue;
      const double d = static_cast<double>(a.data[s]) - b.data[s];
      sum += d * d;
      ++count;
    }
    row_sum[y] = sum;
    row_count[y] = count;
  }
  double sum = 0.0;
  for (int y = 0; y < a.height; ++y) {
    sum += row_sum[y];
    report.count += row_count[y];
  }
  if (report.count == 0) throw Error(ErrorCode::kEmptyMask, "mask selects no subpixels");
  report.mse = sum / static_cast<double>(report.count);
  report.psnr_db = psnr_from_mse(report.mse);

  double ssim_sum = 0.0;
  int channels = 0;
  for (int u = 0; u < 3; ++u) {
    std::size_t selected = 0;
    const double total = channel_ssim(a, b, u, mask, selected);
    if (selected == 0) continue;
    ssim_sum += total / static_cast<double>(selected);
    ++channels;
  }
  report.ssim = ssim_sum / channels;
  return report;
}

ImageMetricsReport lightfield_metrics(const display::InterlacedImage& a,
                                      const display::InterlacedImage& b,
                                      const display::ViewpointMatrix& matrix) {
  const auto& c = matrix.config();
  if (a.pixels.width != c.width || a.pixels.height != c.height) {
    throw Error(ErrorCode::kSizeMismatch, "image does not match the viewpoint matrix");
  }
  ImageMetricsReport report = image_metrics(a.pixels, b.pixels);
  for (int j = 0; j < c.num_views; ++j) {
    const auto da = display::deinterlace(a, matrix, j);
    if (da.count == 0) continue;
    const auto db = display::deinterlace(b, matrix, j);
    const auto m = image_metrics(da.image, db.image, da.mask);
    report.per_view.push_back({j, m.mse, m.psnr_db, m.ssim, m.count});
  }
  return report;
}

nlohmann::json to_json(const ImageMetricsReport& report) {
  auto psnr = [](double db) -> nlohmann::json {
    if (std::isinf(db)) return "inf";
    return db;
  };
  nlohmann::json views = nlohmann::json::array();
  for (const auto& v : report.per_view) {
    views.push_back({{"view", v.view},
                     {"mse", v.mse},
                     {"psnr_db", psnr(v.psnr_db)},
                     {"ssim", v.ssim},
                     {"masked_count", v.masked_count}});
  }
  return {{"schema_version", 1}, {"psnr_db", psnr(report.psnr_db)}, {"ssim", report.ssim},
          {"mse", report.mse},   {"count", report.count},           {"per_view", views}};
}

}  // namespace lfr::oracle
