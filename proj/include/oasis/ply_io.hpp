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

#ifndef OASIS_PLY_IO_HPP_
#define OASIS_PLY_IO_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "oasis/fusion.hpp"
#include "oasis/mesh.hpp"

namespace oasis {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

// Triangle mesh as float vertices (plus normals when present) and int
// triangle indices. Readers throw InputError on malformed files.
void WriteMeshPly(const std::string& path, const TriangleMesh& mesh,
                  PlyFormat format = PlyFormat::kBinaryLittleEndian);
TriangleMesh ReadMeshPly(const std::string& path);

// Colored point cloud: float positions, uchar red/green/blue.
void WriteCloudPly(const std::string& path, const ColoredPointCloud& cloud,
                   PlyFormat format = PlyFormat::kBinaryLittleEndian);
ColoredPointCloud ReadCloudPly(const std::string& path);

// Plain point cloud without colors (occupied-voxel-center exports).
void WritePointsPly(const std::string& path, const std::vector<Eigen::Vector3d>& points,
                    PlyFormat format = PlyFormat::kBinaryLittleEndian);

}  // namespace oasis

#endif  // OASIS_PLY_IO_HPP_
