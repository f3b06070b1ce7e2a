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

#include "oasis/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "oasis/errors.hpp"
#include "oasis/grid_io.hpp"
#include "oasis/ply_io.hpp"
#include "oasis/sim.hpp"

namespace oasis {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point begin, Clock::time_point end) {
  return std::chrono::duration<double>(end - begin).count();
}

// Reported per-frame means skip the first few frames so cache and allocator
// warm-up does not bias them; short runs fall back to the plain mean.
constexpr size_t kWarmupFrames = 5;

double MeanAfterWarmup(const std::vector<double>& seconds) {
  if (seconds.empty()) return 0.0;
  const size_t skip = seconds.size() > kWarmupFrames ? kWarmupFrames : 0;
  double sum = 0.0;
  for (size_t i = skip; i < seconds.size(); ++i) sum += seconds[i];
  return sum / static_cast<double>(seconds.size() - skip);
}

}  // namespace

TriangleMesh MeshFromSnapshot(const GridSnapshot& snapshot, const SmoothParams& smooth) {
  TriangleMesh mesh = MarchingCubes(snapshot);
  mesh = SmoothMesh(mesh, smooth.iterations, smooth.lambda);
  ComputeVertexNormals(mesh);
  return mesh;
}

ReconstructResult RunReconstruct(const FrameLog& log, const PipelineConfig& config,
                                 const std::string& output_dir) {
  config.Validate();
  const VoxelTemplate tmpl = VoxelTemplate::Build(config.sonar, config.carve.voxel_size);
  VoxelGrid grid(config.workspace_min, config.workspace_max, config.carve);

  ReconstructResult result;
  Pose last_integrated;
  bool have_last = false;
  std::vector<double> frame_seconds;

  for (const FrameRecord& record : log.records) {
    if (record.kind != FrameRecord::Kind::kSonar) continue;
    ++result.frames_seen;

    SonarFrame frame;
    frame.intrinsics = config.sonar;
    frame.timestamp = record.timestamp;
    frame.pose = record.pose;
    try {
      frame.data = LoadSonarImage(log, record);
      frame.Validate();
    } catch (const std::exception& e) {
      ++result.frames_malformed;
      std::cerr << "reconstruct: skipping sonar frame '" << record.file
                << "': " << e.what() << "\n";
      continue;
    }

    if (have_last && !ShouldProcess(frame.pose, last_integrated, config.carve.motion_gate)) {
      ++result.frames_gated;
      continue;
    }

    const Clock::time_point begin = Clock::now();
    const BackgroundStats background =
        EstimateBackground(frame, config.preprocess.background_bins);
    const BinaryPolarMap map = Binarize(frame, background, config.preprocess.half_window);
    grid.Integrate(tmpl, map, frame.pose);
    frame_seconds.push_back(Seconds(begin, Clock::now()));

    last_integrated = frame.pose;
    have_last = true;
    ++result.frames_integrated;
  }

  result.mean_frame_seconds = MeanAfterWarmup(frame_seconds);
  result.snapshot = grid.Snapshot();

  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
    WriteGridSnapshot(output_dir + "/grid.oasg", result.snapshot);
    WritePointsPly(output_dir + "/occupied.ply", result.snapshot.OccupiedCenters());
    WriteMeshPly(output_dir + "/mesh.ply",
                 MeshFromSnapshot(result.snapshot, config.smooth));
  }
  return result;
}

FuseResult RunFuse(const FrameLog& log, const GridSnapshot& snapshot,
                   const PipelineConfig& config, const std::string& output_dir) {
  config.Validate();
  FuseResult result;
  result.mesh = MeshFromSnapshot(snapshot, config.smooth);
  const DepthRenderer renderer(result.mesh);

  for (const FrameRecord& record : log.records) {
    if (record.kind != FrameRecord::Kind::kOptical) continue;

    OpticalFrame frame;
    frame.intrinsics = config.camera;
    frame.pose = record.pose;
    frame.timestamp = record.timestamp;
    Mask foreground;
    try {
      frame.pixels = LoadOpticalImage(log, record);
      frame.Validate();
      foreground = config.mask.mode == MaskParams::Mode::kExternal
                       ? LoadExternalMask(log, record)
                       : ForegroundMask(frame, config.mask);
    } catch (const std::exception& e) {
      ++result.frames_skipped;
      std::cerr << "fuse: skipping optical frame '" << record.file << "': " << e.what()
                << "\n";
      continue;
    }
    if (!foreground.SameShape(frame.pixels.rows(), frame.pixels.cols())) {
      ++result.frames_skipped;
      std::cerr << "fuse: skipping optical frame '" << record.file
                << "': mask shape does not match the image\n";
      continue;
    }

    const DepthImage depth = renderer.Render(config.camera, record.pose);
    const Mask usable = MaskIntersect(foreground, DepthValidityMask(depth));
    const ColoredPointCloud part = ProjectPixels(frame, depth, usable);
    result.cloud.points.insert(result.cloud.points.end(), part.points.begin(),
                               part.points.end());
    result.cloud.colors.insert(result.cloud.colors.end(), part.colors.begin(),
                               part.colors.end());
    ++result.frames_used;
  }

  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
    WriteCloudPly(output_dir + "/cloud.ply", result.cloud);
  }
  return result;
}

std::vector<SonarFrame> BenchFrames(const SonarIntrinsics& intrinsics, int frame_count,
                                    std::uint64_t seed) {
  if (frame_count < 1) throw std::invalid_argument("BenchFrames: frame_count must be >= 1");
  const Scene scene = DefaultTankScene();
  const std::vector<TimedPose> trajectory = SweepTrajectory(DefaultTankSweep());
  const SonarNoiseParams noise;

  std::vector<SonarFrame> frames;
  frames.reserve(frame_count);
  const size_t n = trajectory.size();
  for (int i = 0; i < frame_count; ++i) {
    // Spread the poses across the whole sweep so consecutive frames always
    // clear a realistic motion gate and the grid sees varied geometry.
    const size_t pick = frame_count > 1 ? (static_cast<size_t>(i) * (n - 1)) /
                                              static_cast<size_t>(frame_count - 1)
                                        : 0;
    SonarFrame frame =
        RenderSonar(scene, intrinsics, trajectory[pick].pose, noise,
                    /*elevation_samples=*/32, seed + static_cast<std::uint64_t>(i));
    frame.timestamp = trajectory[pick].timestamp;
    frames.push_back(std::move(frame));
  }
  return frames;
}

BenchResult RunBench(const PipelineConfig& config, const std::vector<double>& voxel_sizes,
                     int frame_count, std::uint64_t seed) {
  config.Validate();
  if (voxel_sizes.empty()) {
    throw std::invalid_argument("RunBench: need at least one voxel size");
  }
  const std::vector<SonarFrame> frames = BenchFrames(config.sonar, frame_count, seed);

  BenchResult result;
  for (const double voxel_size : voxel_sizes) {
    CarveConfig carve = config.carve;
    carve.voxel_size = voxel_size;
    carve.Validate();

    const VoxelTemplate tmpl = VoxelTemplate::Build(config.sonar, voxel_size);
    VoxelGrid grid(config.workspace_min, config.workspace_max, carve);

    std::vector<double> frame_seconds;
    frame_seconds.reserve(frames.size());
    double total = 0.0;
    for (const SonarFrame& frame : frames) {
      const Clock::time_point begin = Clock::now();
      const BackgroundStats background =
          EstimateBackground(frame, config.preprocess.background_bins);
      const BinaryPolarMap map =
          Binarize(frame, background, config.preprocess.half_window);
      grid.Integrate(tmpl, map, frame.pose);
      frame_seconds.push_back(Seconds(begin, Clock::now()));
      total += frame_seconds.back();
    }

    BenchPoint point;
    point.voxel_size = voxel_size;
    point.frames = static_cast<int>(frames.size());
    point.total_seconds = total;
    point.mean_frame_seconds = MeanAfterWarmup(frame_seconds);
    point.occupied_voxels = grid.Snapshot().OccupiedCount();
    result.points.push_back(point);
  }

  // Least-squares slope of log(time) on log(1 / voxel). With one point the
  // slope is left at zero.
  if (result.points.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const BenchPoint& p : result.points) {
      const double x = std::log(1.0 / p.voxel_size);
      const double y = std::log(p.total_seconds);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(result.points.size());
    result.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return result;
}

std::string BenchCsv(const BenchResult& result) {
  std::ostringstream out;
  out << "voxel_size,frames,total_seconds,mean_frame_seconds,occupied_voxels\n";
  out << std::setprecision(9);
  for (const BenchPoint& p : result.points) {
    out << p.voxel_size << ',' << p.frames << ',' << p.total_seconds << ','
        << p.mean_frame_seconds << ',' << p.occupied_voxels << '\n';
  }
  return out.str();
}

std::string BenchTable(const BenchResult& result) {
  std::ostringstream out;
  out << "  voxel    frames   total [s]   per frame [ms]   occupied\n";
  for (const BenchPoint& p : result.points) {
    out << std::fixed;
    out << "  " << std::setw(5) << std::setprecision(3) << p.voxel_size;
    out << "  " << std::setw(8) << p.frames;
    out << "  " << std::setw(10) << std::setprecision(3) << p.total_seconds;
    out << "  " << std::setw(15) << std::setprecision(3) << 1e3 * p.mean_frame_seconds;
    out << "  " << std::setw(9) << p.occupied_voxels << '\n';
  }
  out << std::defaultfloat << std::setprecision(3);
  out << "  log-log slope (time vs 1/voxel): " << result.loglog_slope << '\n';
  return out.str();
}

}  // namespace oasis
