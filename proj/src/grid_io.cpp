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

#include "oasis/grid_io.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

constexpr char kMagic[4] = {'O', 'A', 'S', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void WriteRaw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::istream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (in.gcount() != sizeof(T)) throw InputError(path + ": truncated snapshot");
  return value;
}

}  // namespace

void WriteGridSnapshot(const std::string& path, const GridSnapshot& snapshot) {
  const size_t n =
      static_cast<size_t>(snapshot.dims.x()) * snapshot.dims.y() * snapshot.dims.z();
  if (snapshot.occupied.size() != n || snapshot.g_obs.size() != n ||
      snapshot.g_occ.size() != n) {
    throw InputError(path + ": snapshot arrays do not match dims");
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");

  out.write(kMagic, 4);
  WriteRaw(out, kVersion);
  for (int a = 0; a < 3; ++a) WriteRaw(out, snapshot.origin[a]);
  for (int a = 0; a < 3; ++a) WriteRaw(out, static_cast<std::uint32_t>(snapshot.dims[a]));
  WriteRaw(out, snapshot.voxel_size);
  WriteRaw(out, snapshot.ratio_threshold);

  // Occupancy as (length, value) records; runs beyond 32 bits split into
  // several records.
  constexpr std::uint64_t kMaxRun = std::numeric_limits<std::uint32_t>::max();
  std::uint64_t record_count = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && snapshot.occupied[j] == snapshot.occupied[i]) ++j;
    record_count += ((j - i) + kMaxRun - 1) / kMaxRun;
    i = j;
  }
  WriteRaw(out, record_count);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && snapshot.occupied[j] == snapshot.occupied[i]) ++j;
    std::uint64_t remaining = j - i;
    while (remaining > 0) {
      const std::uint32_t length =
          static_cast<std::uint32_t>(std::min(remaining, kMaxRun));
      WriteRaw(out, length);
      WriteRaw(out, snapshot.occupied[i]);
      remaining -= length;
    }
    i = j;
  }

  out.write(reinterpret_cast<const char*>(snapshot.g_obs.data()),
            static_cast<std::streamsize>(n * sizeof(std::uint16_t)));
  out.write(reinterpret_cast<const char*>(snapshot.g_occ.data()),
            static_cast<std::streamsize>(n * sizeof(std::uint16_t)));
  if (!out) throw InputError(path + ": write failed");
}

GridSnapshot ReadGridSnapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");

  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw InputError(path + ": not a grid snapshot (bad magic)");
  }
  const std::uint32_t version = ReadRaw<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw InputError(path + ": unsupported snapshot version");
  }

  GridSnapshot snapshot;
  for (int a = 0; a < 3; ++a) snapshot.origin[a] = ReadRaw<double>(in, path);
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t d = ReadRaw<std::uint32_t>(in, path);
    if (d == 0 || d > (1u << 24)) throw InputError(path + ": absurd grid dims");
    snapshot.dims[a] = static_cast<int>(d);
  }
  snapshot.voxel_size = ReadRaw<double>(in, path);
  snapshot.ratio_threshold = ReadRaw<double>(in, path);
  if (!(snapshot.voxel_size > 0.0)) throw InputError(path + ": bad voxel size");

  const size_t n =
      static_cast<size_t>(snapshot.dims.x()) * snapshot.dims.y() * snapshot.dims.z();
  snapshot.occupied.reserve(n);
  const std::uint64_t run_count = ReadRaw<std::uint64_t>(in, path);
  for (std::uint64_t r = 0; r < run_count; ++r) {
    const std::uint32_t length = ReadRaw<std::uint32_t>(in, path);
    const std::uint8_t value = ReadRaw<std::uint8_t>(in, path);
    if (value > 1) throw InputError(path + ": occupancy value out of range");
    if (snapshot.occupied.size() + length > n) {
      throw InputError(path + ": occupancy runs exceed grid size");
    }
    snapshot.occupied.insert(snapshot.occupied.end(), length, value);
  }
  if (snapshot.occupied.size() != n) {
    throw InputError(path + ": occupancy runs do not cover the grid");
  }

  snapshot.g_obs.resize(n);
  snapshot.g_occ.resize(n);
  in.read(reinterpret_cast<char*>(snapshot.g_obs.data()),
          static_cast<std::streamsize>(n * sizeof(std::uint16_t)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(std::uint16_t))) {
    throw InputError(path + ": truncated observation counts");
  }
  in.read(reinterpret_cast<char*>(snapshot.g_occ.data()),
          static_cast<std::streamsize>(n * sizeof(std::uint16_t)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(std::uint16_t))) {
    throw InputError(path + ": truncated occupied counts");
  }
  return snapshot;
}

}  // namespace oasis
