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

#ifndef OASIS_CARVE_HPP_
#define OASIS_CARVE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "oasis/geometry.hpp"
#include "oasis/preprocess.hpp"

namespace oasis {

struct CarveConfig {
  double ratio_threshold = 0.5;  // t_r: occupied iff g_occ / g_obs > t_r
  double motion_gate = 0.01;     // meters of translation between processed frames
  double voxel_size = 0.05;      // meters

  void Validate() const;
};

// Sensor-frame voxelization of the sonar frustum, each voxel linked to the
// polar pixels whose elevation-ambiguous loci pass through it. Built once per
// (intrinsics, voxel_size) and reused for every frame, which keeps the map
// update real-time: integration touches template voxels, never raw pixels.
//
// Each voxel's pixel links are stored as spans of consecutive beams within a
// range-bin row. A voxel intersects a contiguous interval of ranges and of
// azimuths, so its pixel set decomposes into a few such spans, and the
// per-frame any-pixel-set test becomes a handful of masked word reads
// against a bit-packed map row.
class VoxelTemplate {
 public:
  struct PixelRun {
    std::uint16_t bin;         // range-bin row
    std::uint16_t beam_begin;  // first beam column of the span
    std::uint16_t beam_count;
  };
  struct Entry {
    Eigen::Vector3f center;   // sensor frame, meters
    std::uint32_t run_begin;  // into pixel_runs()
    std::uint32_t run_count;
  };

  // Samples every polar pixel's elevation arc at an angular step of
  // voxel_size / (2 * range) and buckets the samples into voxel centers.
  // Throws if voxel_size < min_voxel_factor * range resolution (template
  // explosion guard).
  static VoxelTemplate Build(const SonarIntrinsics& intrinsics, double voxel_size,
                             double min_voxel_factor = 0.25);

  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<PixelRun>& pixel_runs() const { return runs_; }
  double voxel_size() const { return voxel_size_; }
  const SonarIntrinsics& intrinsics() const { return intrinsics_; }

  // Expands one entry's spans into explicit (bin, beam) pixel indices.
  std::vector<std::pair<int, int>> PixelRefs(size_t entry_index) const;
  // Total number of (voxel, pixel) links across all entries.
  std::uint64_t TotalRefCount() const;

 private:
  std::vector<Entry> entries_;
  std::vector<PixelRun> runs_;
  double voxel_size_ = 0.0;
  SonarIntrinsics intrinsics_;
};

// True when `current` has moved far enough from the last processed pose for
// the frame to be worth integrating. The first frame always passes.
bool ShouldProcess(const Pose& current, const Pose& last_processed, double gate);

// Point-in-time copy of the carved state; later integrations never mutate it.
struct GridSnapshot {
  Eigen::Vector3d origin{0, 0, 0};  // world frame, min corner
  Eigen::Vector3i dims{0, 0, 0};
  double voxel_size = 0.0;
  double ratio_threshold = 0.0;
  std::vector<std::uint8_t> occupied;   // dims.x * dims.y * dims.z, x fastest
  std::vector<std::uint16_t> g_obs;
  std::vector<std::uint16_t> g_occ;

  size_t LinearIndex(int ix, int iy, int iz) const {
    return (static_cast<size_t>(iz) * dims.y() + iy) * dims.x() + ix;
  }
  Eigen::Vector3d VoxelCenter(int ix, int iy, int iz) const {
    return origin + voxel_size * Eigen::Vector3d(ix + 0.5, iy + 0.5, iz + 0.5);
  }
  std::vector<Eigen::Vector3d> OccupiedCenters() const;
  size_t OccupiedCount() const;
};

// World-frame occupancy grid with per-voxel observation and occupied counts.
// Bounds are fixed at construction to the configured workspace box; template
// voxels projecting outside are skipped (and counted). Counts saturate at
// 16 bits: once g_obs hits the ceiling the voxel's counters freeze, which
// keeps g_occ <= g_obs and pins the ratio at its value at saturation.
//
// Single-writer: Integrate() is the only mutator. Readers work from
// Snapshot() copies.
class VoxelGrid {
 public:
  VoxelGrid(const Eigen::Vector3d& workspace_min, const Eigen::Vector3d& workspace_max,
            const CarveConfig& config);

  // One carving step: per template entry, the entry is observed-occupied iff
  // any of its pixels is set in `map`; the entry center is transformed by
  // `pose` (world <- sonar) into a world voxel. Every world voxel touched by
  // the frame gains one observation, and one occupied count iff any of its
  // entries was occupied (a frame is a single observation of a voxel, no
  // matter how many template entries land in it).
  void Integrate(const VoxelTemplate& tmpl, const BinaryPolarMap& map, const Pose& pose);

  GridSnapshot Snapshot() const;

  const Eigen::Vector3d& origin() const { return origin_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  const CarveConfig& config() const { return config_; }
  std::uint64_t frames_integrated() const { return frames_integrated_; }
  std::uint64_t entries_skipped_outside() const { return skipped_outside_; }

  std::uint16_t observations_at(int ix, int iy, int iz) const {
    return g_obs_[Linear(ix, iy, iz)];
  }
  std::uint16_t occupied_count_at(int ix, int iy, int iz) const {
    return g_occ_[Linear(ix, iy, iz)];
  }
  // Derived occupancy: g_obs > 0 and g_occ / g_obs > t_r.
  bool occupied_at(int ix, int iy, int iz) const {
    const size_t i = Linear(ix, iy, iz);
    return IsOccupied(g_occ_[i], g_obs_[i], config_.ratio_threshold);
  }

  static bool IsOccupied(std::uint16_t occ, std::uint16_t obs, double ratio_threshold) {
    return obs > 0 &&
           static_cast<double>(occ) > ratio_threshold * static_cast<double>(obs);
  }

 private:
  size_t Linear(int ix, int iy, int iz) const {
    return (static_cast<size_t>(iz) * dims_.y() + iy) * dims_.x() + ix;
  }

  Eigen::Vector3d origin_;
  Eigen::Vector3i dims_;
  CarveConfig config_;

  std::vector<std::uint16_t> g_obs_;
  std::vector<std::uint16_t> g_occ_;

  // Per-frame dedup scratch: stamp[v] == current frame id means v was already
  // touched this frame and frame_occ_[v] holds its staged occupancy OR.
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> frame_occ_;
  std::vector<std::uint32_t> touched_;
  std::uint32_t frame_id_ = 0;

  // Bit-packed copy of the current frame's binary map, one word-aligned row
  // per range bin.
  std::vector<std::uint64_t> bit_rows_;

  std::uint64_t frames_integrated_ = 0;
  std::uint64_t skipped_outside_ = 0;
};

}  // namespace oasis

#endif  // OASIS_CARVE_HPP_
