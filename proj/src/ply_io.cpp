/*
 * Copyright 2026 The OASIS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oasis/ply_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

void WriteFloat(std::ostream& out, float value, bool binary) {
  if (binary) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
  } else {
    out << value;
  }
}

void WriteHeader(std::ostream& out, PlyFormat format, size_t vertices,
                 bool with_normals, bool with_colors, size_t faces, bool with_faces) {
  // Nine significant digits round-trip 32-bit floats through ascii.
  out << std::setprecision(9);
  out << "ply\n";
  out << (format == PlyFormat::kAscii ? "format ascii 1.0\n"
                                      : "format binary_little_endian 1.0\n");
  out << "element vertex " << vertices << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (with_normals) {
    out << "property float nx\nproperty float ny\nproperty float nz\n";
  }
  if (with_colors) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  if (with_faces) {
    out << "element face " << faces << "\n";
    out << "property list uchar int vertex_indices\n";
  }
  out << "end_header\n";
}

// ---- reader ----

enum class Scalar { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

Scalar ScalarFromName(const std::string& name, const std::string& path) {
  if (name == "char" || name == "int8") return Scalar::kInt8;
  if (name == "uchar" || name == "uint8") return Scalar::kUint8;
  if (name == "short" || name == "int16") return Scalar::kInt16;
  if (name == "ushort" || name == "uint16") return Scalar::kUint16;
  if (name == "int" || name == "int32") return Scalar::kInt32;
  if (name == "uint" || name == "uint32") return Scalar::kUint32;
  if (name == "float" || name == "float32") return Scalar::kFloat32;
  if (name == "double" || name == "float64") return Scalar::kFloat64;
  throw InputError(path + ": unsupported property type '" + name + "'");
}

struct Property {
  std::string name;
  Scalar type = Scalar::kFloat32;
  bool is_list = false;
  Scalar count_type = Scalar::kUint8;
};

struct Element {
  std::string name;
  size_t count = 0;
  std::vector<Property> properties;
};

struct PlyFile {
  bool binary = false;
  std::vector<Element> elements;
};

double ReadBinaryScalar(std::istream& in, Scalar type, const std::string& path) {
  std::array<char, 8> buf;
  const auto pull = [&](size_t n) {
    in.read(buf.data(), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n)) {
      throw InputError(path + ": truncated binary data");
    }
  };
  switch (type) {
    case Scalar::kInt8: {
      pull(1);
      std::int8_t v;
      std::memcpy(&v, buf.data(), 1);
      return v;
    }
    case Scalar::kUint8: {
      pull(1);
      std::uint8_t v;
      std::memcpy(&v, buf.data(), 1);
      return v;
    }
    case Scalar::kInt16: {
      pull(2);
      std::int16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case Scalar::kUint16: {
      pull(2);
      std::uint16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case Scalar::kInt32: {
      pull(4);
      std::int32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case Scalar::kUint32: {
      pull(4);
      std::uint32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case Scalar::kFloat32: {
      pull(4);
      float v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case Scalar::kFloat64: {
      pull(8);
      double v;
      std::memcpy(&v, buf.data(), 8);
      return v;
    }
  }
  throw InputError(path + ": unreachable scalar type");
}

double ReadAsciiScalar(std::istream& in, const std::string& path) {
  double v;
  if (!(in >> v)) throw InputError(path + ": truncated ascii data");
  return v;
}

PlyFile ParseHeader(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw InputError(path + ": missing ply magic");
  }
  PlyFile file;
  bool format_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        file.binary = false;
      } else if (fmt == "binary_little_endian") {
        file.binary = true;
      } else {
        throw InputError(path + ": unsupported format '" + fmt + "'");
      }
      format_seen = true;
    } else if (keyword == "element") {
      Element element;
      ls >> element.name >> element.count;
      if (ls.fail()) throw InputError(path + ": malformed element line");
      file.elements.push_back(element);
    } else if (keyword == "property") {
      if (file.elements.empty()) {
        throw InputError(path + ": property before any element");
      }
      std::string type_name;
      ls >> type_name;
      Property property;
      if (type_name == "list") {
        std::string count_name, item_name;
        ls >> count_name >> item_name >> property.name;
        property.is_list = true;
        property.count_type = ScalarFromName(count_name, path);
        property.type = ScalarFromName(item_name, path);
      } else {
        ls >> property.name;
        property.type = ScalarFromName(type_name, path);
      }
      if (ls.fail()) throw InputError(path + ": malformed property line");
      file.elements.back().properties.push_back(property);
    } else if (keyword == "end_header") {
      if (!format_seen) throw InputError(path + ": missing format line");
      return file;
    } else {
      throw InputError(path + ": unknown header keyword '" + keyword + "'");
    }
  }
  throw InputError(path + ": header not terminated");
}

struct ParsedGeometry {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3d> normals;
  std::vector<Rgb> colors;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  bool has_normals = false;
  bool has_colors = false;
};

ParsedGeometry ReadGeometry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");
  const PlyFile file = ParseHeader(in, path);

  ParsedGeometry geo;
  for (const Element& element : file.elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";

    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
    int ir = -1, ig = -1, ib = -1, iface = -1;
    for (size_t p = 0; p < element.properties.size(); ++p) {
      const std::string& name = element.properties[p].name;
      const int idx = static_cast<int>(p);
      if (name == "x") ix = idx;
      if (name == "y") iy = idx;
      if (name == "z") iz = idx;
      if (name == "nx") inx = idx;
      if (name == "ny") iny = idx;
      if (name == "nz") inz = idx;
      if (name == "red") ir = idx;
      if (name == "green") ig = idx;
      if (name == "blue") ib = idx;
      if (name == "vertex_indices" || name == "vertex_index") iface = idx;
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) {
      throw InputError(path + ": vertex element lacks x/y/z");
    }
    geo.has_normals = geo.has_normals || (is_vertex && inx >= 0 && iny >= 0 && inz >= 0);
    geo.has_colors = geo.has_colors || (is_vertex && ir >= 0 && ig >= 0 && ib >= 0);

    std::vector<double> scalars(element.properties.size(), 0.0);
    std::vector<double> list_values;
    for (size_t row = 0; row < element.count; ++row) {
      list_values.clear();
      for (size_t p = 0; p < element.properties.size(); ++p) {
        const Property& property = element.properties[p];
        if (property.is_list) {
          const double raw_count =
              file.binary ? ReadBinaryScalar(in, property.count_type, path)
                          : ReadAsciiScalar(in, path);
          const int n = static_cast<int>(raw_count);
          if (n < 0 || n > 255) throw InputError(path + ": absurd list count");
          for (int k = 0; k < n; ++k) {
            const double v = file.binary ? ReadBinaryScalar(in, property.type, path)
                                         : ReadAsciiScalar(in, path);
            if (static_cast<int>(p) == iface) list_values.push_back(v);
          }
        } else {
          scalars[p] = file.binary ? ReadBinaryScalar(in, property.type, path)
                                   : ReadAsciiScalar(in, path);
        }
      }
      if (is_vertex) {
        geo.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
        if (geo.has_normals) {
          geo.normals.emplace_back(scalars[inx], scalars[iny], scalars[inz]);
        }
        if (ir >= 0 && ig >= 0 && ib >= 0) {
          geo.colors.push_back(Rgb{static_cast<std::uint8_t>(scalars[ir]),
                                   static_cast<std::uint8_t>(scalars[ig]),
                                   static_cast<std::uint8_t>(scalars[ib])});
        }
      } else if (is_face && iface >= 0) {
        // Fan-triangulate polygons; our own writer only emits triangles.
        for (size_t k = 2; k < list_values.size(); ++k) {
          geo.triangles.push_back({static_cast<std::uint32_t>(list_values[0]),
                                   static_cast<std::uint32_t>(list_values[k - 1]),
                                   static_cast<std::uint32_t>(list_values[k])});
        }
      }
    }
  }
  return geo;
}

}  // namespace

void WriteMeshPly(const std::string& path, const TriangleMesh& mesh, PlyFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  const bool binary = format == PlyFormat::kBinaryLittleEndian;
  const bool with_normals = !mesh.normals.empty();
  if (with_normals && mesh.normals.size() != mesh.vertices.size()) {
    throw InputError(path + ": normal count does not match vertex count");
  }
  WriteHeader(out, format, mesh.vertices.size(), with_normals, false,
              mesh.triangles.size(), true);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      WriteFloat(out, static_cast<float>(mesh.vertices[i][a]), binary);
      if (!binary) out << (a == 2 && !with_normals ? "" : " ");
    }
    if (with_normals) {
      for (int a = 0; a < 3; ++a) {
        WriteFloat(out, static_cast<float>(mesh.normals[i][a]), binary);
        if (!binary && a != 2) out << " ";
      }
    }
    if (!binary) out << "\n";
  }
  for (const auto& triangle : mesh.triangles) {
    if (binary) {
      const std::uint8_t count = 3;
      out.write(reinterpret_cast<const char*>(&count), 1);
      for (const std::uint32_t v : triangle) {
        const std::int32_t idx = static_cast<std::int32_t>(v);
        out.write(reinterpret_cast<const char*>(&idx), 4);
      }
    } else {
      out << "3 " << triangle[0] << " " << triangle[1] << " " << triangle[2] << "\n";
    }
  }
  if (!out) throw InputError(path + ": write failed");
}

TriangleMesh ReadMeshPly(const std::string& path) {
  ParsedGeometry geo = ReadGeometry(path);
  TriangleMesh mesh;
  mesh.vertices = std::move(geo.vertices);
  mesh.triangles = std::move(geo.triangles);
  if (geo.has_normals) mesh.normals = std::move(geo.normals);
  for (const auto& triangle : mesh.triangles) {
    for (const std::uint32_t v : triangle) {
      if (v >= mesh.vertices.size()) {
        throw InputError(path + ": face index out of range");
      }
    }
  }
  return mesh;
}

void WriteCloudPly(const std::string& path, const ColoredPointCloud& cloud,
                   PlyFormat format) {
  if (cloud.points.size() != cloud.colors.size()) {
    throw InputError(path + ": point/color count mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  const bool binary = format == PlyFormat::kBinaryLittleEndian;
  WriteHeader(out, format, cloud.points.size(), false, true, 0, false);
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      WriteFloat(out, static_cast<float>(cloud.points[i][a]), binary);
      if (!binary) out << " ";
    }
    const Rgb& c = cloud.colors[i];
    if (binary) {
      out.write(reinterpret_cast<const char*>(&c), 3);
    } else {
      out << static_cast<int>(c.r) << " " << static_cast<int>(c.g) << " "
          << static_cast<int>(c.b) << "\n";
    }
  }
  if (!out) throw InputError(path + ": write failed");
}

ColoredPointCloud ReadCloudPly(const std::string& path) {
  ParsedGeometry geo = ReadGeometry(path);
  if (geo.has_colors && geo.colors.size() != geo.vertices.size()) {
    throw InputError(path + ": color count does not match vertex count");
  }
  ColoredPointCloud cloud;
  cloud.points = std::move(geo.vertices);
  cloud.colors = geo.has_colors
                     ? std::move(geo.colors)
                     : std::vector<Rgb>(cloud.points.size(), Rgb{255, 255, 255});
  return cloud;
}

void WritePointsPly(const std::string& path, const std::vector<Eigen::Vector3d>& points,
                    PlyFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  const bool binary = format == PlyFormat::kBinaryLittleEndian;
  WriteHeader(out, format, points.size(), false, false, 0, false);
  for (const Eigen::Vector3d& p : points) {
    for (int a = 0; a < 3; ++a) {
      WriteFloat(out, static_cast<float>(p[a]), binary);
      if (!binary) out << (a == 2 ? "\n" : " ");
    }
  }
  if (!out) throw InputError(path + ": write failed");
}

}  // namespace oasis
