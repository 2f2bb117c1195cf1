// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>

// Per-sample splat evaluation shared by the light-field blend kernels and the
// full-frame renderer. Everything here is branch-free so that the packet
// kernel vectorizes, and it must produce the same bits whether it runs in a
// SIMD lane or in scalar code (the build disables FMA contraction).

namespace lfr::splat {

inline constexpr float kMinAlpha = 1.0f / 255.0f;
inline constexpr float kMaxAlpha = 0.99f;
inline constexpr float kMinTransmittance = 1e-4f;

/// exp(x) for x <= ~0 with ~1 ulp error; 0 below -87.
inline float exp_neg(float x) {
  constexpr float kLog2e = 1.44269504088896341f;
  constexpr float kLn2Hi = 0.693359375f;
  constexpr float kLn2Lo = -2.12194440e-4f;
  constexpr float kRoundMagic = 12582912.0f;  // 1.5 * 2^23
  const bool underflow = x < -87.0f;
  x = x < -87.0f ? -87.0f : x;
  x = x > 0.5f ? 0.5f : x;
  const float n = (x * kLog2e + kRoundMagic) - kRoundMagic;
  float r = x - n * kLn2Hi;
  r = r - n * kLn2Lo;
  float p = 1.9875691500e-4f;
  p = p * r + 1.3981999507e-3f;
  p = p * r + 8.3334519073e-3f;
  p = p * r + 4.1665795894e-2f;
  p = p * r + 1.6666665459e-1f;
  p = p * r + 5.0000001201e-1f;
  const float rr = r * r;
  const float e = p * rr + r + 1.0f;
  const std::int32_t bits = (static_cast<std::int32_t>(n) + 127) << 23;
  const float scale = std::bit_cast<float>(bits);
  const float result = e * scale;
  return underflow ? 0.0f : result;
}

/// a*dx^2 + 2b*dx*dy + c*dy^2.
inline float conic_q(float a, float b, float c, float dx, float dy) {
  return a * dx * dx + 2.0f * b * dx * dy + c * dy * dy;
}

/// Opacity of a splat at offset (dx, dy), clamped to kMaxAlpha. Callers skip
/// the sample when the result is below kMinAlpha.
inline float alpha_at(float opacity, float a, float b, float c, float dx, float dy) {
  const float alpha = opacity * exp_neg(-0.5f * conic_q(a, b, c, dx, dy));
  return alpha > kMaxAlpha ? kMaxAlpha : alpha;
}

}  // namespace lfr::splat
