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

#include "oasis/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace oasis {

namespace {

// Cell corner c has offsets (c & 1, c >> 1 & 1, c >> 2 & 1). The six
// tetrahedra all share the main diagonal 0-7; each is one monotone corner
// path 0 -> 7, so the decomposition is identical in every cell and adjacent
// cells agree on the face diagonals.
constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
    {0, 2, 6, 7}, {0, 4, 6, 7}, {0, 4, 5, 7},
};

struct CornerSample {
  Eigen::Vector3d position;
  std::uint64_t id;  // global lattice sample id
  double value;
};

class VertexWelder {
 public:
  explicit VertexWelder(TriangleMesh& mesh, double iso) : mesh_(mesh), iso_(iso) {}

  std::uint32_t VertexOnEdge(const CornerSample& a, const CornerSample& b) {
    const CornerSample& lo = a.id < b.id ? a : b;
    const CornerSample& hi = a.id < b.id ? b : a;
    const std::uint64_t key = (lo.id << 32) | hi.id;
    const auto it = map_.find(key);
    if (it != map_.end()) return it->second;

    const double t = (iso_ - lo.value) / (hi.value - lo.value);
    const std::uint32_t index = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(lo.position + t * (hi.position - lo.position));
    map_.emplace(key, index);
    return index;
  }

 private:
  TriangleMesh& mesh_;
  double iso_;
  std::unordered_map<std::uint64_t, std::uint32_t> map_;
};

void EmitTriangle(TriangleMesh& mesh, std::uint32_t v0, std::uint32_t v1,
                  std::uint32_t v2, const Eigen::Vector3d& outward) {
  const Eigen::Vector3d& a = mesh.vertices[v0];
  const Eigen::Vector3d normal =
      (mesh.vertices[v1] - a).cross(mesh.vertices[v2] - a);
  if (normal.dot(outward) < 0.0) std::swap(v1, v2);
  mesh.triangles.push_back({v0, v1, v2});
}

void PolygonizeTet(const CornerSample corners[4], double iso, VertexWelder& welder,
                   TriangleMesh& mesh) {
  int inside[4], outside[4];
  int n_inside = 0, n_outside = 0;
  for (int i = 0; i < 4; ++i) {
    if (corners[i].value > iso) {
      inside[n_inside++] = i;
    } else {
      outside[n_outside++] = i;
    }
  }
  if (n_inside == 0 || n_inside == 4) return;

  Eigen::Vector3d in_centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d out_centroid = Eigen::Vector3d::Zero();
  for (int i = 0; i < n_inside; ++i) in_centroid += corners[inside[i]].position;
  for (int i = 0; i < n_outside; ++i) out_centroid += corners[outside[i]].position;
  const Eigen::Vector3d outward = out_centroid / n_outside - in_centroid / n_inside;

  if (n_inside == 1 || n_inside == 3) {
    const int apex = n_inside == 1 ? inside[0] : outside[0];
    const int* ring = n_inside == 1 ? outside : inside;
    const std::uint32_t v0 = welder.VertexOnEdge(corners[apex], corners[ring[0]]);
    const std::uint32_t v1 = welder.VertexOnEdge(corners[apex], corners[ring[1]]);
    const std::uint32_t v2 = welder.VertexOnEdge(corners[apex], corners[ring[2]]);
    EmitTriangle(mesh, v0, v1, v2, outward);
  } else {
    // Two in, two out: the patch is a planar quad whose boundary runs across
    // the four tet faces in the order ac, ad, bd, bc.
    const CornerSample& a = corners[inside[0]];
    const CornerSample& b = corners[inside[1]];
    const CornerSample& c = corners[outside[0]];
    const CornerSample& d = corners[outside[1]];
    const std::uint32_t vac = welder.VertexOnEdge(a, c);
    const std::uint32_t vad = welder.VertexOnEdge(a, d);
    const std::uint32_t vbd = welder.VertexOnEdge(b, d);
    const std::uint32_t vbc = welder.VertexOnEdge(b, c);
    EmitTriangle(mesh, vac, vad, vbd, outward);
    EmitTriangle(mesh, vac, vbd, vbc, outward);
  }
}

}  // namespace

TriangleMesh MarchingCubes(const GridSnapshot& snapshot, double iso) {
  if (!(iso > 0.0 && iso < 1.0)) {
    throw std::invalid_argument("MarchingCubes: iso must be in (0, 1)");
  }
  TriangleMesh mesh;
  const int nx = snapshot.dims.x(), ny = snapshot.dims.y(), nz = snapshot.dims.z();
  if (static_cast<size_t>(nx) * ny * nz != snapshot.occupied.size()) {
    throw std::invalid_argument("MarchingCubes: snapshot dims do not match data");
  }
  if (snapshot.occupied.empty()) return mesh;

  const auto occ = [&](int ix, int iy, int iz) -> double {
    if (ix < 0 || iy < 0 || iz < 0 || ix >= nx || iy >= ny || iz >= nz) return 0.0;
    return snapshot.occupied[snapshot.LinearIndex(ix, iy, iz)] ? 1.0 : 0.0;
  };
  // Sample ids over the padded lattice [-1 .. n] per axis.
  const std::uint64_t sx = nx + 2, sy = ny + 2;
  const auto sample_id = [&](int ix, int iy, int iz) -> std::uint64_t {
    return (static_cast<std::uint64_t>(iz + 1) * sy + (iy + 1)) * sx + (ix + 1);
  };

  VertexWelder welder(mesh, iso);
  CornerSample corners[8];
  CornerSample tet[4];

  for (int iz = -1; iz < nz; ++iz) {
    for (int iy = -1; iy < ny; ++iy) {
      for (int ix = -1; ix < nx; ++ix) {
        int occupied_corners = 0;
        for (int c = 0; c < 8; ++c) {
          const int cx = ix + (c & 1), cy = iy + ((c >> 1) & 1), cz = iz + ((c >> 2) & 1);
          const double v = occ(cx, cy, cz);
          occupied_corners += v > iso ? 1 : 0;
          corners[c] = {snapshot.VoxelCenter(cx, cy, cz), sample_id(cx, cy, cz), v};
        }
        if (occupied_corners == 0 || occupied_corners == 8) continue;
        for (const auto& t : kTets) {
          for (int i = 0; i < 4; ++i) tet[i] = corners[t[i]];
          PolygonizeTet(tet, iso, welder, mesh);
        }
      }
    }
  }
  return mesh;
}

TriangleMesh SmoothMesh(const TriangleMesh& mesh, int iterations, double lambda) {
  if (iterations < 0) throw std::invalid_argument("SmoothMesh: iterations must be >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("SmoothMesh: lambda must be in (0, 1)");
  }
  TriangleMesh out = mesh;
  if (iterations == 0 || mesh.vertices.empty()) return out;

  std::vector<std::vector<std::uint32_t>> ring(mesh.vertices.size());
  for (const auto& tri : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      ring[tri[i]].push_back(tri[(i + 1) % 3]);
      ring[tri[i]].push_back(tri[(i + 2) % 3]);
    }
  }
  for (auto& r : ring) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }

  std::vector<Eigen::Vector3d> next(out.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (size_t v = 0; v < out.vertices.size(); ++v) {
      if (ring[v].empty()) {
        next[v] = out.vertices[v];
        continue;
      }
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (const std::uint32_t n : ring[v]) mean += out.vertices[n];
      mean /= static_cast<double>(ring[v].size());
      next[v] = out.vertices[v] + lambda * (mean - out.vertices[v]);
    }
    out.vertices.swap(next);
  }
  out.normals.clear();
  return out;
}

void ComputeVertexNormals(TriangleMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Eigen::Vector3d::Zero());
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d& a = mesh.vertices[tri[0]];
    const Eigen::Vector3d n =
        (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a);
    for (int i = 0; i < 3; ++i) mesh.normals[tri[i]] += n;
  }
  for (auto& n : mesh.normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
}

}  // namespace oasis
