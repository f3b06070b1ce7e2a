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

#ifndef OASIS_PIPELINE_HPP_
#define OASIS_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "oasis/carve.hpp"
#include "oasis/config.hpp"
#include "oasis/frame_log.hpp"
#include "oasis/fusion.hpp"
#include "oasis/mesh.hpp"
#include "oasis/preprocess.hpp"

namespace oasis {

struct ReconstructResult {
  GridSnapshot snapshot;
  std::uint64_t frames_seen = 0;        // sonar records in the log
  std::uint64_t frames_integrated = 0;  // passed the gate and were carved
  std::uint64_t frames_gated = 0;       // skipped: too little motion
  std::uint64_t frames_malformed = 0;   // skipped: unreadable or wrong shape
  double mean_frame_seconds = 0.0;      // preprocess + integrate, per integrated frame
};

// Carves the workspace grid from every sonar record in the log, in log
// order. Malformed frames are skipped with a diagnostic on stderr; frames
// that moved less than the motion gate since the last integrated frame are
// skipped silently. When output_dir is non-empty, writes grid.oasg,
// occupied.ply (voxel centers) and mesh.ply (smoothed isosurface) there.
ReconstructResult RunReconstruct(const FrameLog& log, const PipelineConfig& config,
                                 const std::string& output_dir = "");

struct FuseResult {
  ColoredPointCloud cloud;
  TriangleMesh mesh;              // the surface the depths were rendered from
  std::uint64_t frames_used = 0;
  std::uint64_t frames_skipped = 0;
};

// Colors the carved surface: renders mesh depth from each optical record's
// camera pose, masks the image (per config.mask), and back-projects masked
// pixels onto the surface. When output_dir is non-empty, writes cloud.ply.
FuseResult RunFuse(const FrameLog& log, const GridSnapshot& snapshot,
                   const PipelineConfig& config, const std::string& output_dir = "");

// Isosurface of the snapshot, Laplacian-smoothed, with vertex normals.
TriangleMesh MeshFromSnapshot(const GridSnapshot& snapshot, const SmoothParams& smooth);

struct BenchPoint {
  double voxel_size = 0.0;
  int frames = 0;
  double total_seconds = 0.0;       // preprocess + integrate over all frames
  double mean_frame_seconds = 0.0;
  std::uint64_t occupied_voxels = 0;
};

struct BenchResult {
  std::vector<BenchPoint> points;  // in the order the sizes were given
  // Least-squares slope of log(total_seconds) against log(1 / voxel_size).
  double loglog_slope = 0.0;
};

// Renders `frame_count` synthetic sonar frames once (poses spread evenly
// over the default tank sweep), then times preprocess + integrate over the
// same frames for each voxel size. Template construction is not timed.
BenchResult RunBench(const PipelineConfig& config, const std::vector<double>& voxel_sizes,
                     int frame_count, std::uint64_t seed = 1u);

// The frame set RunBench times against, for callers that need it directly.
std::vector<SonarFrame> BenchFrames(const SonarIntrinsics& intrinsics, int frame_count,
                                    std::uint64_t seed);

std::string BenchCsv(const BenchResult& result);
std::string BenchTable(const BenchResult& result);

}  // namespace oasis

#endif  // OASIS_PIPELINE_HPP_
