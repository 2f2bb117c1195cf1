// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "lfr/error.hpp"
#include "lfr/scene.hpp"

namespace lfr::scene {

namespace {

// Uniform double in [0, 1) from the top 53 bits; fixed across standard
// library implementations, unlike std::uniform_real_distribution.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 rng_;
};

constexpr float kPalette[8][3] = {
    {0.90f, 0.30f, 0.25f}, {0.95f, 0.75f, 0.20f}, {0.30f, 0.75f, 0.35f}, {0.20f, 0.55f, 0.90f},
    {0.65f, 0.35f, 0.85f}, {0.95f, 0.55f, 0.70f}, {0.25f, 0.80f, 0.80f}, {0.85f, 0.85f, 0.85f},
};

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

const float* palette_color(const Eigen::Vector3f& p, float extent) {
  // Hash of the position quantized to cells of extent/4.
  const float cell = extent > 0.0f ? extent / 4.0f : 1.0f;
  std::uint64_t h = 0;
  for (int a = 0; a < 3; ++a) {
    const auto q = static_cast<std::int64_t>(std::floor(p[a] / cell));
    h = mix(h ^ static_cast<std::uint64_t>(q) ^ (0x9e3779b97f4a7c15ULL * (a + 1)));
  }
  return kPalette[h % 8];
}

void validate(const SyntheticSceneSpec& s) {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (s.count < 1) fail("count must be >= 1");
  if (!(s.extent > 0.0f) || !std::isfinite(s.extent)) fail("extent must be positive");
  if (!(s.scale_min > 0.0f) || !(s.scale_min <= s.scale_max) || !std::isfinite(s.scale_max)) {
    fail("scale range must satisfy 0 < min <= max");
  }
  if (!(s.opacity_min >= 0.0f) || !(s.opacity_min <= s.opacity_max) || !(s.opacity_max <= 1.0f)) {
    fail("opacity range must satisfy 0 <= min <= max <= 1");
  }
  if (s.sh_degree < 0 || s.sh_degree > kMaxShDegree) fail("sh_degree must be in [0, 3]");
}

}  // namespace

Layout parse_layout(const std::string& name) {
  if (name == "grid") return Layout::kGrid;
  if (name == "sphere-shell") return Layout::kSphereShell;
  if (name == "uniform-box") return Layout::kUniformBox;
  throw Error(ErrorCode::kInvalidSpec, "unknown layout '" + name + "'");
}

const char* to_string(Layout layout) {
  switch (layout) {
    case Layout::kGrid: return "grid";
    case Layout::kSphereShell: return "sphere-shell";
    case Layout::kUniformBox: return "uniform-box";
  }
  return "?";
}

GaussianScene generate_synthetic_scene(const SyntheticSceneSpec& spec) {
  validate(spec);
  Uniform rng(spec.seed);
  const int rest = (spec.sh_degree + 1) * (spec.sh_degree + 1) - 1;
  const int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(spec.count)) - 1e-9));
  const double e = spec.extent;

  std::vector<Gaussian3D> gaussians(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    Gaussian3D& g = gaussians[i];
    switch (spec.layout) {
      case Layout::kGrid: {
        const int ix = i % side, iy = (i / side) % side, iz = i / (side * side);
        const double step = 2.0 * e / side;
        g.mean = Eigen::Vector3f(float(-e + (ix + 0.5) * step), float(-e + (iy + 0.5) * step),
                                 float(-e + (iz + 0.5) * step));
        break;
      }
      case Layout::kSphereShell: {
        const double z = rng.range(-1.0, 1.0);
        const double phi = rng.range(0.0, 2.0 * std::numbers::pi);
        const double r = e + rng.range(-spec.scale_max, spec.scale_max);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        g.mean = Eigen::Vector3f(float(r * s * std::cos(phi)), float(r * s * std::sin(phi)),
                                 float(r * z));
        break;
      }
      case Layout::kUniformBox:
        g.mean = Eigen::Vector3f(float(rng.range(-e, e)), float(rng.range(-e, e)),
                                 float(rng.range(-e, e)));
        break;
    }
    for (int a = 0; a < 3; ++a) g.scale[a] = float(rng.range(spec.scale_min, spec.scale_max));
    // Uniform random rotation (Shoemake).
    const double u1 = rng.next(), u2 = rng.next(), u3 = rng.next();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
    g.rotation = Eigen::Quaternionf(float(b * std::cos(t3)), float(a * std::sin(t2)),
                                    float(a * std::cos(t2)), float(b * std::sin(t3)));
    g.rotation.normalize();
    g.opacity = float(rng.range(spec.opacity_min, spec.opacity_max));

    const float* color = palette_color(g.mean, spec.extent);
    for (int c = 0; c < 3; ++c) g.sh[c] = (color[c] - 0.5f) / sh_constants::kC0;
    for (int r = 0; r < 3 * rest; ++r) g.sh[3 + r] = float(rng.range(-0.1, 0.1));
  }
  return GaussianScene(std::move(gaussians), spec.sh_degree);
}

}  // namespace lfr::scene
