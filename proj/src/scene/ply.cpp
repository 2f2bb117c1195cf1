// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lfr/error.hpp"
#include "lfr/scene.hpp"

namespace lfr::scene {

namespace {

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::optional<ScalarType> parse_scalar_type(const std::string& name) {
  static const std::map<std::string, ScalarType> kTypes = {
      {"char", ScalarType::kInt8},     {"int8", ScalarType::kInt8},
      {"uchar", ScalarType::kUInt8},   {"uint8", ScalarType::kUInt8},
      {"short", ScalarType::kInt16},   {"int16", ScalarType::kInt16},
      {"ushort", ScalarType::kUInt16}, {"uint16", ScalarType::kUInt16},
      {"int", ScalarType::kInt32},     {"int32", ScalarType::kInt32},
      {"uint", ScalarType::kUInt32},   {"uint32", ScalarType::kUInt32},
      {"float", ScalarType::kFloat32}, {"float32", ScalarType::kFloat32},
      {"double", ScalarType::kFloat64}, {"float64", ScalarType::kFloat64},
  };
  const auto it = kTypes.find(name);
  if (it == kTypes.end()) return std::nullopt;
  return it->second;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUInt8: return 1;
    case ScalarType::kInt16:
    case ScalarType::kUInt16: return 2;
    case ScalarType::kInt32:
    case ScalarType::kUInt32:
    case ScalarType::kFloat32: return 4;
    case ScalarType::kFloat64: return 8;
  }
  return 0;
}

template <typename T>
T load_le(const std::byte* p) {
  static_assert(std::endian::native == std::endian::little);
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double read_scalar(ScalarType t, const std::byte* p) {
  switch (t) {
    case ScalarType::kInt8: return load_le<std::int8_t>(p);
    case ScalarType::kUInt8: return load_le<std::uint8_t>(p);
    case ScalarType::kInt16: return load_le<std::int16_t>(p);
    case ScalarType::kUInt16: return load_le<std::uint16_t>(p);
    case ScalarType::kInt32: return load_le<std::int32_t>(p);
    case ScalarType::kUInt32: return load_le<std::uint32_t>(p);
    case ScalarType::kFloat32: return load_le<float>(p);
    case ScalarType::kFloat64: return load_le<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type;
  std::size_t offset;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  std::size_t stride = 0;
};

struct Header {
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

Header parse_header(std::span<const std::byte> bytes) {
  // The header is ASCII terminated by "end_header\n".
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!text.starts_with("ply\n") && !text.starts_with("ply\r\n")) {
    throw Error(ErrorCode::kMalformedHeader, "missing ply magic");
  }
  const std::size_t end = text.find("end_header");
  if (end == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedHeader, "missing end_header");
  }
  std::size_t body = text.find('\n', end);
  if (body == std::string_view::npos) throw Error(ErrorCode::kMalformedHeader, "unterminated header");
  Header header;
  header.body_offset = body + 1;

  std::istringstream lines{std::string(text.substr(0, end))};
  std::string line;
  bool have_format = false;
  std::getline(lines, line);  // magic
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii" || fmt == "binary_big_endian") {
        throw Error(ErrorCode::kUnsupportedFormat, "format " + fmt);
      }
      if (fmt != "binary_little_endian") throw Error(ErrorCode::kMalformedHeader, "format " + fmt);
      have_format = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0) throw Error(ErrorCode::kMalformedHeader, line);
      e.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (header.elements.empty()) throw Error(ErrorCode::kMalformedHeader, "property before element");
      std::string type_name, name;
      ls >> type_name;
      if (type_name == "list") {
        throw Error(ErrorCode::kUnsupportedFormat, "list properties are not supported");
      }
      ls >> name;
      const auto type = parse_scalar_type(type_name);
      if (!type || name.empty()) throw Error(ErrorCode::kMalformedHeader, line);
      auto& e = header.elements.back();
      e.properties.push_back({name, *type, e.stride});
      e.stride += type_size(*type);
    } else {
      throw Error(ErrorCode::kMalformedHeader, "unknown keyword '" + keyword + "'");
    }
  }
  if (!have_format) throw Error(ErrorCode::kMalformedHeader, "missing format line");
  return header;
}

int degree_from_rest_count(std::size_t rest) {
  for (int d = 0; d <= kMaxShDegree; ++d) {
    if (static_cast<std::size_t>(3 * ((d + 1) * (d + 1) - 1)) == rest) return d;
  }
  return -1;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

GaussianScene load_ply(std::span<const std::byte> bytes) {
  const Header header = parse_header(bytes);
  std::size_t offset = header.body_offset;
  const Element* vertex = nullptr;
  std::size_t vertex_offset = 0;
  for (const auto& e : header.elements) {
    if (e.name == "vertex") {
      vertex = &e;
      vertex_offset = offset;
      break;
    }
    offset += e.count * e.stride;
  }
  if (vertex == nullptr) throw Error(ErrorCode::kMalformedHeader, "no vertex element");

  std::map<std::string, const Property*> by_name;
  for (const auto& p : vertex->properties) by_name[p.name] = &p;
  auto require = [&](const std::string& name) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::kMalformedHeader, "missing property " + name);
    return it->second;
  };

  std::vector<const Property*> fields;  // x y z dc0..2 opacity scale0..2 rot0..3
  for (const char* n : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0",
                        "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    fields.push_back(require(n));
  }
  std::size_t rest_count = 0;
  while (by_name.count("f_rest_" + std::to_string(rest_count))) ++rest_count;
  const int degree = degree_from_rest_count(rest_count);
  if (degree < 0) {
    throw Error(ErrorCode::kMalformedHeader,
                std::to_string(rest_count) + " f_rest properties match no SH degree");
  }
  std::vector<const Property*> rest;
  for (std::size_t r = 0; r < rest_count; ++r) rest.push_back(by_name["f_rest_" + std::to_string(r)]);

  std::size_t known = fields.size() + rest.size();
  for (const char* n : {"nx", "ny", "nz"}) known += by_name.count(n);
  if (known < vertex->properties.size()) {
    std::cerr << "warning: ignoring " << (vertex->properties.size() - known)
              << " unknown vertex properties\n";
  }

  const std::size_t needed = vertex->count * vertex->stride;
  if (vertex_offset + needed > bytes.size()) {
    throw Error(ErrorCode::kTruncatedBody, "vertex data needs " + std::to_string(needed) +
                                               " bytes, file has " +
                                               std::to_string(bytes.size() - std::min(bytes.size(), vertex_offset)));
  }

  std::vector<Gaussian3D> gaussians(vertex->count);
  for (std::size_t i = 0; i < vertex->count; ++i) {
    const std::byte* row = bytes.data() + vertex_offset + i * vertex->stride;
    double v[14];
    for (int f = 0; f < 14; ++f) {
      v[f] = read_scalar(fields[f]->type, row + fields[f]->offset);
      if (!std::isfinite(v[f])) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "vertex " + std::to_string(i) + " property " + fields[f]->name);
      }
    }
    auto& g = gaussians[i];
    g.mean = Eigen::Vector3f(float(v[0]), float(v[1]), float(v[2]));
    g.sh[0] = float(v[3]);
    g.sh[1] = float(v[4]);
    g.sh[2] = float(v[5]);
    for (std::size_t r = 0; r < rest.size(); ++r) {
      const double c = read_scalar(rest[r]->type, row + rest[r]->offset);
      if (!std::isfinite(c)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "vertex " + std::to_string(i) + " property " + rest[r]->name);
      }
      g.sh[3 + r] = float(c);
    }
    g.opacity = float(sigmoid(v[6]));
    g.scale = Eigen::Vector3f(float(std::exp(v[7])), float(std::exp(v[8])), float(std::exp(v[9])));
    const double qn = std::sqrt(v[10] * v[10] + v[11] * v[11] + v[12] * v[12] + v[13] * v[13]);
    if (!(qn > 0.0) || !g.scale.allFinite() || !(g.scale.array() > 0.0f).all()) {
      throw Error(ErrorCode::kNonFiniteValue, "vertex " + std::to_string(i) +
                                                  ": zero rotation or out-of-range scale");
    }
    g.rotation = Eigen::Quaternionf(float(v[10] / qn), float(v[11] / qn), float(v[12] / qn),
                                    float(v[13] / qn));
  }
  return GaussianScene(std::move(gaussians), degree);
}

GaussianScene load_ply_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> raw{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_ply(std::as_bytes(std::span<const char>(raw)));
}

std::vector<std::byte> save_ply(const GaussianScene& scene) {
  const int degree = scene.sh_degree();
  const int rest = 3 * ((degree + 1) * (degree + 1) - 1);
  std::ostringstream h;
  h << "ply\nformat binary_little_endian 1.0\n";
  h << "element vertex " << scene.size() << "\n";
  for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
    h << "property float " << n << "\n";
  }
  for (int r = 0; r < rest; ++r) h << "property float f_rest_" << r << "\n";
  for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    h << "property float " << n << "\n";
  }
  h << "end_header\n";
  const std::string head = h.str();

  const std::size_t floats_per_vertex = 9 + rest + 8;
  std::vector<float> body;
  body.reserve(scene.size() * floats_per_vertex);
  for (const auto& g : scene.gaussians()) {
    body.insert(body.end(), {g.mean.x(), g.mean.y(), g.mean.z(), 0.0f, 0.0f, 0.0f, g.sh[0],
                             g.sh[1], g.sh[2]});
    for (int r = 0; r < rest; ++r) body.push_back(g.sh[3 + r]);
    const double o = std::clamp(static_cast<double>(g.opacity), 1e-7, 1.0 - 1e-7);
    body.push_back(float(std::log(o / (1.0 - o))));
    for (int a = 0; a < 3; ++a) body.push_back(float(std::log(double(g.scale[a]))));
    body.insert(body.end(), {g.rotation.w(), g.rotation.x(), g.rotation.y(), g.rotation.z()});
  }

  std::vector<std::byte> out(head.size() + body.size() * sizeof(float));
  std::memcpy(out.data(), head.data(), head.size());
  std::memcpy(out.data() + head.size(), body.data(), body.size() * sizeof(float));
  return out;
}

void save_ply_file(const GaussianScene& scene, const std::filesystem::path& path) {
  const auto bytes = save_ply(scene);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace lfr::scene
