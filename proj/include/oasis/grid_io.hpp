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

#ifndef OASIS_GRID_IO_HPP_
#define OASIS_GRID_IO_HPP_

#include <string>

#include "oasis/carve.hpp"

namespace oasis {

// Binary snapshot blob: "OASG" magic, version, header (origin, dims,
// voxel_size, ratio threshold), run-length-encoded occupancy, then the raw
// 16-bit observation and occupied-count arrays. Little-endian throughout.
void WriteGridSnapshot(const std::string& path, const GridSnapshot& snapshot);
GridSnapshot ReadGridSnapshot(const std::string& path);  // throws InputError

}  // namespace oasis

#endif  // OASIS_GRID_IO_HPP_
