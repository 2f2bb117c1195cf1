// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lfr/error.hpp"

namespace lfr {

std::uint8_t quantize_unit(float v) {
  if (!(v > 0.0f)) return 0;
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::floor(static_cast<double>(v) * 255.0 + 0.5));
}

namespace {

void write_png_impl(const std::filesystem::path& path, int width, int height,
                    png_uint_32 format, const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image) {
  std::vector<std::uint8_t> rgb(image.data.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = quantize_unit(image.data[i]);
  write_png_rgb8(path, image.width, image.height, rgb);
}

void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::kSizeMismatch, "rgb buffer does not match image size");
  }
  write_png_impl(path, width, height, PNG_FORMAT_RGB, rgb);
}

void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kSizeMismatch, "gray buffer does not match image size");
  }
  write_png_impl(path, width, height, PNG_FORMAT_GRAY, gray);
}

Image read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kIo, "cannot read " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot decode " + path.string() + ": " + msg);
  }
  Image out(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = buffer[i] / 255.0f;
  return out;
}

void write_raw(const std::filesystem::path& path, const Image& image) {
  static_assert(std::endian::native == std::endian::little,
                "raw dumps are written in native order");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(image.data.data()),
            static_cast<std::streamsize>(image.data.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Image read_raw(const std::filesystem::path& path, int width, int height) {
  const auto bytes = read_file(path);
  Image img(width, height);
  if (bytes.size() != img.data.size() * sizeof(float)) {
    throw Error(ErrorCode::kSizeMismatch,
                path.string() + " holds " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(img.data.size() * sizeof(float)));
  }
  std::memcpy(img.data.data(), bytes.data(), bytes.size());
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace lfr
