// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>

#include "lfr/error.hpp"
#include "lfr/oracle.hpp"
#include "lfr/splat_math.hpp"

namespace lfr::oracle {

namespace {

struct ViewSplat {
  float mx = 0.0f, my = 0.0f;
  camera::SharedProjection proj;
};

struct TileKey {
  std::uint64_t key;
  std::uint32_t gaussian;
};

}  // namespace

Image render_view_fullframe(const scene::GaussianScene& scene, const camera::Camera& camera,
                            const Rgb& background, int tile_size) {
  camera.validate();
  if (tile_size < 1) throw Error(ErrorCode::kInvalidConfig, "tile_size must be >= 1");
  const int w = camera.width, h = camera.height;
  const int tiles_x = (w + tile_size - 1) / tile_size;
  const int tiles_y = (h + tile_size - 1) / tile_size;
  const auto m = static_cast<std::ptrdiff_t>(scene.size());

  std::vector<ViewSplat> splats(m);
  std::vector<std::uint8_t> live(m, 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const auto p = camera::project_mean(camera, scene[i].mean);
    if (!p.visible) continue;
    try {
      splats[i].proj = camera::project_shared(camera, scene[i], scene.sh_degree());
    } catch (const Error&) {
      continue;
    }
    if (!splats[i].proj.contributes()) continue;
    splats[i].mx = p.mean2d.x();
    splats[i].my = p.mean2d.y();
    live[i] = 1;
  }

  // Bounding-box culling over tiles, widened slightly for rounding at the
  // cutoff level.
  std::vector<TileKey> keys;
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    if (!live[i]) continue;
    const auto& c = splats[i].proj.conic;
    const double q = c.cutoff_q * 1.001 + 1e-3;
    const double hx = std::sqrt(c.cov_xx * q), hy = std::sqrt(c.cov_yy * q);
    const double x0 = std::max(std::ceil(splats[i].mx - hx - 0.5), 0.0);
    const double x1 = std::min(std::floor(splats[i].mx + hx - 0.5), w - 1.0);
    const double y0 = std::max(std::ceil(splats[i].my - hy - 0.5), 0.0);
    const double y1 = std::min(std::floor(splats[i].my + hy - 0.5), h - 1.0);
    if (x0 > x1 || y0 > y1) continue;
    const std::uint32_t depth = std::bit_cast<std::uint32_t>(splats[i].proj.depth);
    for (int ty = static_cast<int>(y0) / tile_size; ty <= static_cast<int>(y1) / tile_size; ++ty) {
      for (int tx = static_cast<int>(x0) / tile_size; tx <= static_cast<int>(x1) / tile_size;
           ++tx) {
        const auto tile = static_cast<std::uint64_t>(ty * tiles_x + tx);
        keys.push_back({(tile << 32) | depth, static_cast<std::uint32_t>(i)});
      }
    }
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const TileKey& a, const TileKey& b) { return a.key < b.key; });
  std::vector<std::size_t> begin(static_cast<std::size_t>(tiles_x) * tiles_y + 1, keys.size());
  for (std::size_t e = keys.size(); e-- > 0;) begin[keys[e].key >> 32] = e;
  for (std::size_t t = begin.size() - 1; t-- > 0;) begin[t] = std::min(begin[t], begin[t + 1]);

  Image out(w, h);
#pragma omp parallel for schedule(dynamic, 4)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t tile = static_cast<std::size_t>(y / tile_size) * tiles_x + x / tile_size;
      const float px = static_cast<float>(x) + 0.5f, py = static_cast<float>(y) + 0.5f;
      float color[3] = {0.0f, 0.0f, 0.0f};
      float trans = 1.0f;
      for (std::size_t e = begin[tile]; e < begin[tile + 1]; ++e) {
        const ViewSplat& s = splats[keys[e].gaussian];
        const auto& c = s.proj.conic;
        const float alpha = splat::alpha_at(s.proj.eff_opacity, c.a, c.b, c.c, px - s.mx, py - s.my);
        if (alpha < splat::kMinAlpha) continue;
        for (int u = 0; u < 3; ++u) color[u] = color[u] + s.proj.color[u] * alpha * trans;
        trans = trans * (1.0f - alpha);
        if (trans < splat::kMinTransmittance) break;
      }
      for (int u = 0; u < 3; ++u) out.at(x, y, u) = color[u] + background[u] * trans;
    }
  }
  return out;
}

display::InterlacedImage render_lightfield_fullframe(const scene::GaussianScene& scene,
                                                     const display::DisplayConfig& config,
                                                     std::span<const camera::Camera> rig,
                                                     const Rgb& background,
                                                     std::vector<Image>* views_out) {
  const auto matrix = display::build_viewpoint_matrix(config);
  if (rig.size() != static_cast<std::size_t>(config.num_views)) {
    throw Error(ErrorCode::kCountMismatch, "rig has " + std::to_string(rig.size()) +
                                               " cameras, display expects " +
                                               std::to_string(config.num_views));
  }
  std::vector<Image> views;
  views.reserve(rig.size());
  for (const auto& cam : rig) {
    views.push_back(render_view_fullframe(scene, cam, background, config.tile_size));
  }
  auto out = display::interlace(views, matrix);
  if (views_out) *views_out = std::move(views);
  return out;
}

}  // namespace lfr::oracle
