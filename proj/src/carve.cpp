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

#include "oasis/carve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oasis {

void CarveConfig::Validate() const {
  if (!(ratio_threshold >= 0.0 && ratio_threshold <= 1.0)) {
    throw std::invalid_argument("CarveConfig: ratio_threshold must be in [0, 1]");
  }
  if (motion_gate < 0.0) {
    throw std::invalid_argument("CarveConfig: motion_gate must be >= 0");
  }
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("CarveConfig: voxel_size must be positive");
  }
}

namespace {

// Packs a signed 3D voxel index into one sortable key (21 bits per axis).
inline std::uint64_t PackKey(int ix, int iy, int iz) {
  constexpr std::uint64_t kBias = 1u << 20;
  return ((static_cast<std::uint64_t>(iz) + kBias) << 42) |
         ((static_cast<std::uint64_t>(iy) + kBias) << 21) |
         (static_cast<std::uint64_t>(ix) + kBias);
}

inline Eigen::Vector3f UnpackCenter(std::uint64_t key, float voxel_size) {
  constexpr std::int64_t kBias = 1 << 20;
  const std::int64_t ix = static_cast<std::int64_t>(key & 0x1FFFFF) - kBias;
  const std::int64_t iy = static_cast<std::int64_t>((key >> 21) & 0x1FFFFF) - kBias;
  const std::int64_t iz = static_cast<std::int64_t>((key >> 42) & 0x1FFFFF) - kBias;
  return Eigen::Vector3f((ix + 0.5f) * voxel_size, (iy + 0.5f) * voxel_size,
                         (iz + 0.5f) * voxel_size);
}

// True iff any bit in [begin, begin + count) of the packed row is set.
inline bool AnyBitInSpan(const std::uint64_t* row, int begin, int count) {
  const int last = begin + count - 1;
  const int w0 = begin >> 6;
  const int w1 = last >> 6;
  if (w0 == w1) {
    const std::uint64_t width_mask =
        count >= 64 ? ~0ull : ((1ull << count) - 1) << (begin & 63);
    return (row[w0] & width_mask) != 0;
  }
  if (row[w0] & (~0ull << (begin & 63))) return true;
  for (int w = w0 + 1; w < w1; ++w) {
    if (row[w]) return true;
  }
  const int tail_bits = (last & 63) + 1;
  const std::uint64_t tail_mask = tail_bits >= 64 ? ~0ull : (1ull << tail_bits) - 1;
  return (row[w1] & tail_mask) != 0;
}

}  // namespace

VoxelTemplate VoxelTemplate::Build(const SonarIntrinsics& intrinsics, double voxel_size,
                                   double min_voxel_factor) {
  intrinsics.Validate();
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("VoxelTemplate: voxel_size must be positive");
  }
  if (voxel_size < min_voxel_factor * intrinsics.RangeResolution()) {
    throw std::invalid_argument(
        "VoxelTemplate: voxel_size below the explosion guard (min_voxel_factor * "
        "range resolution)");
  }

  const double inv_vs = 1.0 / voxel_size;
  const double half_vfov = intrinsics.vfov / 2.0;

  // (voxel key, pixel) pairs; sort + unique turns them into grouped entries.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> samples;
  samples.reserve(static_cast<size_t>(intrinsics.beams) * intrinsics.range_bins * 4);

  for (int bin = 0; bin < intrinsics.range_bins; ++bin) {
    const double range = intrinsics.BinRange(bin);
    // Arc-length Nyquist: angular step <= voxel_size / (2 * range).
    const double max_step = voxel_size / (2.0 * range);
    const int n_el = std::max(2, static_cast<int>(std::ceil(intrinsics.vfov / max_step)) + 1);
    const double el_step = intrinsics.vfov / (n_el - 1);

    for (int beam = 0; beam < intrinsics.beams; ++beam) {
      const double azimuth = intrinsics.BeamAzimuth(beam);
      const double cos_az = std::cos(azimuth);
      const double sin_az = std::sin(azimuth);
      const std::uint32_t pixel =
          static_cast<std::uint32_t>(bin) * intrinsics.beams + beam;

      std::uint64_t last_key = std::numeric_limits<std::uint64_t>::max();
      for (int e = 0; e < n_el; ++e) {
        const double el = -half_vfov + e * el_step;
        const double ce = std::cos(el);
        const double x = range * ce * cos_az;
        const double y = range * ce * sin_az;
        const double z = range * std::sin(el);
        const std::uint64_t key =
            PackKey(static_cast<int>(std::floor(x * inv_vs)),
                    static_cast<int>(std::floor(y * inv_vs)),
                    static_cast<int>(std::floor(z * inv_vs)));
        if (key != last_key) {
          samples.emplace_back(key, pixel);
          last_key = key;
        }
      }
    }
  }

  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  VoxelTemplate tmpl;
  tmpl.voxel_size_ = voxel_size;
  tmpl.intrinsics_ = intrinsics;

  const int beams = intrinsics.beams;
  size_t i = 0;
  while (i < samples.size()) {
    const std::uint64_t key = samples[i].first;
    Entry entry;
    entry.center = UnpackCenter(key, static_cast<float>(voxel_size));
    entry.run_begin = static_cast<std::uint32_t>(tmpl.runs_.size());
    // Pixels arrive sorted by linear index, so each bin's beams are in
    // order; stretch the current span while they stay consecutive.
    while (i < samples.size() && samples[i].first == key) {
      const std::uint32_t pixel = samples[i].second;
      const std::uint16_t bin = static_cast<std::uint16_t>(pixel / beams);
      const std::uint16_t beam = static_cast<std::uint16_t>(pixel % beams);
      if (entry.run_begin < tmpl.runs_.size()) {
        PixelRun& open = tmpl.runs_.back();
        if (open.bin == bin && open.beam_begin + open.beam_count == beam) {
          ++open.beam_count;
          ++i;
          continue;
        }
      }
      tmpl.runs_.push_back(PixelRun{bin, beam, 1});
      ++i;
    }
    entry.run_count = static_cast<std::uint32_t>(tmpl.runs_.size()) - entry.run_begin;
    tmpl.entries_.push_back(entry);
  }
  return tmpl;
}

std::vector<std::pair<int, int>> VoxelTemplate::PixelRefs(size_t entry_index) const {
  const Entry& entry = entries_.at(entry_index);
  std::vector<std::pair<int, int>> refs;
  for (std::uint32_t r = entry.run_begin; r < entry.run_begin + entry.run_count; ++r) {
    const PixelRun& run = runs_[r];
    for (int k = 0; k < run.beam_count; ++k) {
      refs.emplace_back(run.bin, run.beam_begin + k);
    }
  }
  return refs;
}

std::uint64_t VoxelTemplate::TotalRefCount() const {
  std::uint64_t total = 0;
  for (const PixelRun& run : runs_) total += run.beam_count;
  return total;
}

bool ShouldProcess(const Pose& current, const Pose& last_processed, double gate) {
  return (current.translation() - last_processed.translation()).norm() > gate;
}

VoxelGrid::VoxelGrid(const Eigen::Vector3d& workspace_min,
                     const Eigen::Vector3d& workspace_max, const CarveConfig& config)
    : origin_(workspace_min), config_(config) {
  config.Validate();
  if (!(workspace_min.array() < workspace_max.array()).all()) {
    throw std::invalid_argument("VoxelGrid: workspace box is empty");
  }
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::max(
        1, static_cast<int>(std::ceil((workspace_max[a] - workspace_min[a]) /
                                      config.voxel_size)));
  }
  const size_t n = static_cast<size_t>(dims_.x()) * dims_.y() * dims_.z();
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("VoxelGrid: workspace/voxel_size imply too many voxels");
  }
  g_obs_.assign(n, 0);
  g_occ_.assign(n, 0);
  stamp_.assign(n, 0);
  frame_occ_.assign(n, 0);
}

void VoxelGrid::Integrate(const VoxelTemplate& tmpl, const BinaryPolarMap& map,
                          const Pose& pose) {
  const int bins = tmpl.intrinsics().range_bins;
  const int beams = tmpl.intrinsics().beams;
  if (!map.data.SameShape(bins, beams)) {
    throw std::invalid_argument("Integrate: map shape does not match template");
  }

  if (frame_id_ == std::numeric_limits<std::uint32_t>::max()) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    frame_id_ = 0;
  }
  ++frame_id_;
  touched_.clear();

  // Pack the map into per-bin bit rows so each pixel span is one or two
  // masked word reads; the packed map stays resident in cache for the whole
  // template pass.
  const int words_per_row = (beams + 63) / 64;
  bit_rows_.assign(static_cast<size_t>(bins) * words_per_row, 0);
  {
    const std::uint8_t* px = map.data.data();
    for (int bin = 0; bin < bins; ++bin) {
      std::uint64_t* row = bit_rows_.data() + static_cast<size_t>(bin) * words_per_row;
      for (int beam = 0; beam < beams; ++beam, ++px) {
        if (*px) row[beam >> 6] |= 1ull << (beam & 63);
      }
    }
  }

  const Eigen::Matrix3d& rot = pose.rotation();
  const Eigen::Vector3d& trans = pose.translation();
  const double inv_vs = 1.0 / config_.voxel_size;
  const VoxelTemplate::PixelRun* runs = tmpl.pixel_runs().data();
  const int nx = dims_.x(), ny = dims_.y(), nz = dims_.z();

  for (const VoxelTemplate::Entry& entry : tmpl.entries()) {
    std::uint8_t occ = 0;
    const VoxelTemplate::PixelRun* run = runs + entry.run_begin;
    const VoxelTemplate::PixelRun* end = run + entry.run_count;
    for (; run != end; ++run) {
      const std::uint64_t* row =
          bit_rows_.data() + static_cast<size_t>(run->bin) * words_per_row;
      if (AnyBitInSpan(row, run->beam_begin, run->beam_count)) {
        occ = 1;
        break;
      }
    }

    const Eigen::Vector3d world = rot * entry.center.cast<double>() + trans;
    const int ix = static_cast<int>(std::floor((world.x() - origin_.x()) * inv_vs));
    const int iy = static_cast<int>(std::floor((world.y() - origin_.y()) * inv_vs));
    const int iz = static_cast<int>(std::floor((world.z() - origin_.z()) * inv_vs));
    if (ix < 0 || iy < 0 || iz < 0 || ix >= nx || iy >= ny || iz >= nz) {
      ++skipped_outside_;
      continue;
    }
    const size_t lin = Linear(ix, iy, iz);
    if (stamp_[lin] != frame_id_) {
      stamp_[lin] = frame_id_;
      frame_occ_[lin] = occ;
      touched_.push_back(static_cast<std::uint32_t>(lin));
    } else {
      frame_occ_[lin] |= occ;
    }
  }

  for (const std::uint32_t lin : touched_) {
    if (g_obs_[lin] == std::numeric_limits<std::uint16_t>::max()) continue;
    ++g_obs_[lin];
    g_occ_[lin] = static_cast<std::uint16_t>(g_occ_[lin] + frame_occ_[lin]);
  }
  ++frames_integrated_;
}

GridSnapshot VoxelGrid::Snapshot() const {
  GridSnapshot snap;
  snap.origin = origin_;
  snap.dims = dims_;
  snap.voxel_size = config_.voxel_size;
  snap.ratio_threshold = config_.ratio_threshold;
  snap.g_obs = g_obs_;
  snap.g_occ = g_occ_;
  snap.occupied.resize(g_obs_.size());
  for (size_t i = 0; i < g_obs_.size(); ++i) {
    snap.occupied[i] = IsOccupied(g_occ_[i], g_obs_[i], config_.ratio_threshold) ? 1 : 0;
  }
  return snap;
}

std::vector<Eigen::Vector3d> GridSnapshot::OccupiedCenters() const {
  std::vector<Eigen::Vector3d> centers;
  size_t i = 0;
  for (int iz = 0; iz < dims.z(); ++iz) {
    for (int iy = 0; iy < dims.y(); ++iy) {
      for (int ix = 0; ix < dims.x(); ++ix, ++i) {
        if (occupied[i]) centers.push_back(VoxelCenter(ix, iy, iz));
      }
    }
  }
  return centers;
}

size_t GridSnapshot::OccupiedCount() const {
  size_t n = 0;
  for (const std::uint8_t v : occupied) n += v;
  return n;
}

}  // namespace oasis
