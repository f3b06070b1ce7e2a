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

#ifndef OASIS_MESH_HPP_
#define OASIS_MESH_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "oasis/carve.hpp"

namespace oasis {

// Indexed triangle mesh, world frame, counterclockwise winding viewed from
// outside (outward normals).
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<Eigen::Vector3d> normals;  // optional; empty or one per vertex
};

// Extracts the isosurface of the {0,1} occupancy field sampled at voxel
// centers. Cells outside the grid sample as empty, so occupied regions
// touching the grid boundary are capped rather than left open.
//
// Each lattice cell is split into six tetrahedra sharing the cell's main
// diagonal; the split is identical for every cell, so neighboring cells cut
// shared faces along the same diagonal and the surface has no ambiguous-face
// holes: every surface edge interior to the lattice is shared by exactly two
// triangles.
TriangleMesh MarchingCubes(const GridSnapshot& snapshot, double iso = 0.5);

// Uniform-weight Laplacian smoothing: each vertex moves toward the mean of
// its one-ring neighbors by `lambda` per iteration. Topology (vertex count,
// triangle indices) is unchanged.
TriangleMesh SmoothMesh(const TriangleMesh& mesh, int iterations, double lambda);

// Area-weighted vertex normals, normalized.
void ComputeVertexNormals(TriangleMesh& mesh);

}  // namespace oasis

#endif  // OASIS_MESH_HPP_
