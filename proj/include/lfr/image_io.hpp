// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lfr/image.hpp"

namespace lfr {

/// 8-bit quantization used by every PNG writer: clamp to [0,1], scale by 255,
/// round half up.
std::uint8_t quantize_unit(float v);

void write_png(const std::filesystem::path& path, const Image& image);
void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& rgb);
void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& gray);

/// Reads an 8-bit PNG (any color type) as RGB floats in [0,1].
Image read_png(const std::filesystem::path& path);

/// Little-endian float32 dump, row-major, subpixel-minor, no header.
void write_raw(const std::filesystem::path& path, const Image& image);
Image read_raw(const std::filesystem::path& path, int width, int height);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace lfr
