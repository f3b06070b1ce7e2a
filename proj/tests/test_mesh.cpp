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

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <doctest.h>

#include "oasis/mesh.hpp"

namespace oasis {
namespace {

GridSnapshot EmptySnapshot(int nx, int ny, int nz, double voxel) {
  GridSnapshot snap;
  snap.origin = Eigen::Vector3d(0, 0, 0);
  snap.dims = Eigen::Vector3i(nx, ny, nz);
  snap.voxel_size = voxel;
  snap.ratio_threshold = 0.5;
  const size_t n = static_cast<size_t>(nx) * ny * nz;
  snap.occupied.assign(n, 0);
  snap.g_obs.assign(n, 0);
  snap.g_occ.assign(n, 0);
  return snap;
}

GridSnapshot SphereSnapshot(int radius_voxels, double voxel) {
  const int n = 2 * radius_voxels + 6;
  GridSnapshot snap = EmptySnapshot(n, n, n, voxel);
  const Eigen::Vector3d center = snap.origin + 0.5 * voxel * Eigen::Vector3d(n, n, n);
  const double radius = radius_voxels * voxel;
  for (int iz = 0; iz < n; ++iz) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const Eigen::Vector3d c = snap.VoxelCenter(ix, iy, iz);
        if ((c - center).norm() <= radius) {
          snap.occupied[snap.LinearIndex(ix, iy, iz)] = 1;
        }
      }
    }
  }
  return snap;
}

// Map of undirected edges to incident triangle counts.
std::map<std::pair<std::uint32_t, std::uint32_t>, int> EdgeCounts(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> counts;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      std::uint32_t a = tri[e];
      std::uint32_t b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++counts[{a, b}];
    }
  }
  return counts;
}

bool IsWatertight(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  for (const auto& [edge, count] : EdgeCounts(mesh)) {
    if (count != 2) return false;
  }
  return true;
}

// Signed volume via the divergence theorem; positive for outward-facing
// counterclockwise winding.
double SignedVolume(const TriangleMesh& mesh) {
  double volume = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d& a = mesh.vertices[tri[0]];
    const Eigen::Vector3d& b = mesh.vertices[tri[1]];
    const Eigen::Vector3d& c = mesh.vertices[tri[2]];
    volume += a.dot(b.cross(c)) / 6.0;
  }
  return volume;
}

TEST_CASE("empty grid meshes to nothing") {
  const GridSnapshot snap = EmptySnapshot(8, 8, 8, 0.05);
  const TriangleMesh mesh = MarchingCubes(snap);
  CHECK(mesh.vertices.empty());
  CHECK(mesh.triangles.empty());
}

TEST_CASE("single voxel meshes to a small closed solid") {
  GridSnapshot snap = EmptySnapshot(7, 7, 7, 0.1);
  snap.occupied[snap.LinearIndex(3, 3, 3)] = 1;
  const TriangleMesh mesh = MarchingCubes(snap);

  REQUIRE(!mesh.triangles.empty());
  CHECK(IsWatertight(mesh));
  CHECK(SignedVolume(mesh) > 0.0);

  const Eigen::Vector3d center = snap.VoxelCenter(3, 3, 3);
  const double half_diag = 0.5 * std::sqrt(3.0) * snap.voxel_size;
  for (const Eigen::Vector3d& v : mesh.vertices) {
    CHECK((v - center).norm() <= half_diag + 1e-12);
    CHECK((v - center).norm() > 0.0);
  }
}

TEST_CASE("occupied voxel on the grid boundary still closes") {
  GridSnapshot snap = EmptySnapshot(4, 4, 4, 0.1);
  snap.occupied[snap.LinearIndex(0, 0, 0)] = 1;
  const TriangleMesh mesh = MarchingCubes(snap);
  REQUIRE(!mesh.triangles.empty());
  CHECK(IsWatertight(mesh));
  CHECK(SignedVolume(mesh) > 0.0);
}

TEST_CASE("sphere meshes watertight with bounded deviation") {
  const double voxel = 0.05;
  const int radius_voxels = 5;
  const GridSnapshot snap = SphereSnapshot(radius_voxels, voxel);
  const TriangleMesh mesh = MarchingCubes(snap);

  REQUIRE(!mesh.triangles.empty());
  CHECK(IsWatertight(mesh));

  const int n = snap.dims.x();
  const Eigen::Vector3d center = snap.origin + 0.5 * voxel * Eigen::Vector3d(n, n, n);
  const double radius = radius_voxels * voxel;
  const double diag = std::sqrt(3.0) * voxel;
  for (const Eigen::Vector3d& v : mesh.vertices) {
    CHECK(std::abs((v - center).norm() - radius) <= diag);
  }

  // Volume within coarse voxelization error of the analytic ball.
  const double analytic = 4.0 / 3.0 * M_PI * std::pow(radius, 3);
  const double meshed = SignedVolume(mesh);
  CHECK(meshed > 0.5 * analytic);
  CHECK(meshed < 1.5 * analytic);
}

TEST_CASE("two disjoint voxels produce two closed components") {
  GridSnapshot snap = EmptySnapshot(9, 5, 5, 0.1);
  snap.occupied[snap.LinearIndex(1, 2, 2)] = 1;
  snap.occupied[snap.LinearIndex(7, 2, 2)] = 1;
  const TriangleMesh mesh = MarchingCubes(snap);
  CHECK(IsWatertight(mesh));
  // Same closed geometry around each voxel doubles the single-voxel counts.
  GridSnapshot one = EmptySnapshot(9, 5, 5, 0.1);
  one.occupied[one.LinearIndex(1, 2, 2)] = 1;
  const TriangleMesh single = MarchingCubes(one);
  CHECK(mesh.triangles.size() == 2 * single.triangles.size());
  CHECK(mesh.vertices.size() == 2 * single.vertices.size());
}

TEST_CASE("iso level selects the crossing point") {
  GridSnapshot snap = EmptySnapshot(7, 7, 7, 0.1);
  snap.occupied[snap.LinearIndex(3, 3, 3)] = 1;
  // A low iso level pushes the surface toward the empty neighbors, a high
  // level pulls it toward the occupied center; volume must shrink with iso.
  const double lo = SignedVolume(MarchingCubes(snap, 0.25));
  const double mid = SignedVolume(MarchingCubes(snap, 0.5));
  const double hi = SignedVolume(MarchingCubes(snap, 0.75));
  CHECK(lo > mid);
  CHECK(mid > hi);
  CHECK(hi > 0.0);
}

TEST_CASE("smoothing keeps topology and container sizes") {
  const GridSnapshot snap = SphereSnapshot(4, 0.05);
  const TriangleMesh mesh = MarchingCubes(snap);
  const TriangleMesh smoothed = SmoothMesh(mesh, 3, 0.5);

  REQUIRE(smoothed.vertices.size() == mesh.vertices.size());
  REQUIRE(smoothed.triangles.size() == mesh.triangles.size());
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    CHECK(smoothed.triangles[i] == mesh.triangles[i]);
  }
  CHECK(IsWatertight(smoothed));

  // Zero iterations is the identity.
  const TriangleMesh same = SmoothMesh(mesh, 0, 0.5);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK((same.vertices[i] - mesh.vertices[i]).norm() == 0.0);
  }
}

TEST_CASE("smoothing contracts toward the one-ring mean") {
  const GridSnapshot snap = SphereSnapshot(4, 0.05);
  const TriangleMesh mesh = MarchingCubes(snap);
  const int n = snap.dims.x();
  const Eigen::Vector3d center =
      snap.origin + 0.5 * snap.voxel_size * Eigen::Vector3d(n, n, n);

  // Laplacian smoothing of a closed convex-ish surface shrinks it; mean
  // radius must decrease monotonically with iterations.
  auto mean_radius = [&](const TriangleMesh& m) {
    double sum = 0.0;
    for (const Eigen::Vector3d& v : m.vertices) sum += (v - center).norm();
    return sum / static_cast<double>(m.vertices.size());
  };
  const double r0 = mean_radius(mesh);
  const double r1 = mean_radius(SmoothMesh(mesh, 1, 0.5));
  const double r3 = mean_radius(SmoothMesh(mesh, 3, 0.5));
  CHECK(r1 < r0);
  CHECK(r3 < r1);
  // And a stronger lambda moves farther in one step.
  const double r1strong = mean_radius(SmoothMesh(mesh, 1, 0.9));
  CHECK(r1strong < r1);
}

TEST_CASE("vertex normals are unit length and point outward on a sphere") {
  const GridSnapshot snap = SphereSnapshot(5, 0.05);
  TriangleMesh mesh = MarchingCubes(snap);
  ComputeVertexNormals(mesh);

  REQUIRE(mesh.normals.size() == mesh.vertices.size());
  const int n = snap.dims.x();
  const Eigen::Vector3d center =
      snap.origin + 0.5 * snap.voxel_size * Eigen::Vector3d(n, n, n);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(mesh.normals[i].norm() == doctest::Approx(1.0).epsilon(1e-9));
    // Outward means along the radial direction, not against it.
    CHECK(mesh.normals[i].dot(mesh.vertices[i] - center) > 0.0);
  }
}

}  // namespace
}  // namespace oasis
