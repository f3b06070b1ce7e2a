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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>
#include <Eigen/Geometry>

#include "oasis/config.hpp"
#include "oasis/frame_log.hpp"
#include "oasis/image_io.hpp"
#include "oasis/pipeline.hpp"
#include "oasis/sim.hpp"

namespace oasis {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("oasis_pipeline_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Small sensor and a close-in scene so each test log renders in tens of
// milliseconds.
PipelineConfig SmallConfig() {
  PipelineConfig config = DefaultConfig();
  config.sonar.beams = 96;
  config.sonar.range_bins = 80;
  config.sonar.hfov = 70.0 * kDegrees;
  config.sonar.min_range = 0.1;
  config.sonar.max_range = 1.5;
  config.camera.width = 80;
  config.camera.height = 60;
  config.camera.fx = 70.0;
  config.camera.fy = 70.0;
  config.camera.cx = 40.0;
  config.camera.cy = 30.0;
  config.workspace_min = Eigen::Vector3d(-1.5, -1.5, -0.3);
  config.workspace_max = Eigen::Vector3d(1.5, 1.5, 1.0);
  return config;
}

Scene SphereScene() {
  Scene scene;
  Primitive sphere;
  sphere.kind = Primitive::Kind::kSphere;
  sphere.size = Eigen::Vector3d(0.25, 0, 0);
  sphere.pose = Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, 0.4));
  sphere.color = Rgb{220, 90, 40};
  scene.Add(sphere);
  return scene;
}

// Half-ring of sonar poses around the origin, all aimed inward, at the
// sphere's height. A half orbit (not a full one) on purpose: in open water
// the range bins behind the first echo stay dark, so a surface patch seen
// from one side but shadowed from the opposite side collects as many misses
// as hits and a full orbit pins its occupancy ratio at exactly the default
// threshold. Staying on one side keeps the visible hemisphere decisively hot.
std::vector<Pose> OrbitPoses(int count, double radius, double z) {
  std::vector<Pose> poses;
  for (int i = 0; i < count; ++i) {
    const double angle = M_PI * (i + 0.5) / count;
    const Eigen::Matrix3d heading =
        Eigen::AngleAxisd(angle + M_PI, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    poses.emplace_back(heading,
                       Eigen::Vector3d(radius * std::cos(angle),
                                       radius * std::sin(angle), z));
  }
  return poses;
}

std::string WriteSphereLog(const TempDir& dir, const PipelineConfig& config,
                           int frames) {
  const Scene scene = SphereScene();
  const std::string log_dir = dir / "log";
  FrameLogWriter writer(log_dir);
  SonarNoiseParams noise;
  const std::vector<Pose> poses = OrbitPoses(frames, 1.0, 0.4);
  for (int i = 0; i < frames; ++i) {
    SonarFrame frame = RenderSonar(scene, config.sonar, poses[i], noise, 12,
                                   1000 + static_cast<std::uint64_t>(i));
    frame.timestamp = 0.1 * i;
    writer.AddSonar(frame);
  }
  writer.Close();
  return log_dir;
}

TEST_CASE("reconstruct carves a sphere-sized blob and writes outputs") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = WriteSphereLog(dir, config, 24);
  const FrameLog log = ReadFrameLog(log_dir);

  const std::string out_dir = dir / "out";
  const ReconstructResult result = RunReconstruct(log, config, out_dir);

  CHECK(result.frames_seen == 24);
  CHECK(result.frames_integrated == 24);
  CHECK(result.frames_malformed == 0);
  CHECK(result.mean_frame_seconds > 0.0);
  REQUIRE(result.snapshot.OccupiedCount() > 0);

  // Every occupied voxel sits within a couple of voxels of the true ball.
  const Eigen::Vector3d center(0.0, 0.0, 0.4);
  for (const Eigen::Vector3d& c : result.snapshot.OccupiedCenters()) {
    CHECK((c - center).norm() < 0.25 + 2.5 * config.carve.voxel_size);
  }

  CHECK(fs::exists(fs::path(out_dir) / "grid.oasg"));
  CHECK(fs::exists(fs::path(out_dir) / "occupied.ply"));
  CHECK(fs::exists(fs::path(out_dir) / "mesh.ply"));
}

TEST_CASE("reconstruct is deterministic") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = WriteSphereLog(dir, config, 10);
  const FrameLog log = ReadFrameLog(log_dir);

  const ReconstructResult a = RunReconstruct(log, config);
  const ReconstructResult b = RunReconstruct(log, config);
  CHECK(a.snapshot.g_obs == b.snapshot.g_obs);
  CHECK(a.snapshot.g_occ == b.snapshot.g_occ);
  CHECK(a.snapshot.occupied == b.snapshot.occupied);
}

TEST_CASE("motion gate skips stationary frames") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const Scene scene = SphereScene();

  const std::string log_dir = dir / "log";
  {
    FrameLogWriter writer(log_dir);
    const Pose pose = OrbitPoses(8, 1.0, 0.4)[0];
    for (int i = 0; i < 5; ++i) {
      SonarFrame frame = RenderSonar(scene, config.sonar, pose, SonarNoiseParams{}, 8,
                                     50 + static_cast<std::uint64_t>(i));
      frame.timestamp = 0.1 * i;
      writer.AddSonar(frame);  // identical pose every time
    }
    writer.Close();
  }

  const FrameLog log = ReadFrameLog(log_dir);
  const ReconstructResult result = RunReconstruct(log, config);
  CHECK(result.frames_seen == 5);
  CHECK(result.frames_integrated == 1);  // first always passes
  CHECK(result.frames_gated == 4);
}

TEST_CASE("malformed frames are skipped and counted") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = WriteSphereLog(dir, config, 4);

  // Corrupt the second sonar image: replace it with a smaller one.
  const FrameLog before = ReadFrameLog(log_dir);
  PipelineConfig tiny = config;
  tiny.sonar.beams = 8;
  tiny.sonar.range_bins = 8;
  SonarFrame wrong;
  wrong.intrinsics = tiny.sonar;
  wrong.data = Image2D<std::uint8_t>(8, 8, 5);
  WritePgm(log_dir + "/" + before.records[1].file, wrong.data);

  const FrameLog log = ReadFrameLog(log_dir);
  const ReconstructResult result = RunReconstruct(log, config);
  CHECK(result.frames_seen == 4);
  CHECK(result.frames_malformed == 1);
  CHECK(result.frames_integrated == 3);
}

TEST_CASE("empty log reconstructs to an empty grid") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = dir / "log";
  {
    FrameLogWriter writer(log_dir);
    OpticalFrame optical;
    optical.intrinsics = config.camera;
    optical.pixels = Image2D<Rgb>(config.camera.height, config.camera.width);
    writer.AddOptical(optical);  // optical only, no sonar
    writer.Close();
  }
  const FrameLog log = ReadFrameLog(log_dir);
  const ReconstructResult result = RunReconstruct(log, config);
  CHECK(result.frames_seen == 0);
  CHECK(result.frames_integrated == 0);
  CHECK(result.snapshot.OccupiedCount() == 0);
  CHECK(result.mean_frame_seconds == 0.0);
}

TEST_CASE("fuse colors the carved surface from optical frames") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const Scene scene = SphereScene();

  // Sonar pass for the geometry.
  const std::string log_dir = WriteSphereLog(dir, config, 24);

  // Re-open the log directory and append optical frames with ground-truth
  // masks at poses facing the sphere.
  {
    const FrameLog existing = ReadFrameLog(log_dir);
    const double last = existing.records.back().timestamp;
    FrameLogWriter writer(log_dir + "_optical");
    for (int i = 0; i < 4; ++i) {
      // Same side of the sphere the sonar half-orbit carved.
      const double angle = M_PI * (i + 0.5) / 4;
      const Eigen::Vector3d eye(0.9 * std::cos(angle), 0.9 * std::sin(angle), 0.4);
      const Eigen::Vector3d target(0, 0, 0.4);
      const Eigen::Vector3d fwd = (target - eye).normalized();
      const Eigen::Vector3d right = fwd.cross(Eigen::Vector3d::UnitZ()).normalized();
      const Eigen::Vector3d down = fwd.cross(right).normalized();
      Eigen::Matrix3d r;
      r.col(0) = right;
      r.col(1) = down;
      r.col(2) = fwd;
      const Pose pose(r, eye);

      const OpticalRender render = RenderOptical(scene, config.camera, pose, Rgb{3, 6, 9});
      OpticalFrame frame = render.frame;
      frame.pose = pose;
      frame.timestamp = last + 1.0 + i;
      Mask mask(config.camera.height, config.camera.width, 0);
      for (int v = 0; v < mask.rows(); ++v) {
        for (int u = 0; u < mask.cols(); ++u) {
          mask.at(v, u) = render.primitive_ids.at(v, u) >= 0 ? 1 : 0;
        }
      }
      writer.AddOptical(frame, &mask);
    }
    writer.Close();
  }

  const FrameLog sonar_log = ReadFrameLog(log_dir);
  const ReconstructResult recon = RunReconstruct(sonar_log, config);
  REQUIRE(recon.snapshot.OccupiedCount() > 0);

  PipelineConfig fuse_config = config;
  fuse_config.mask.mode = MaskParams::Mode::kExternal;
  const FrameLog optical_log = ReadFrameLog(log_dir + "_optical");
  const std::string fuse_dir = dir / "fused";
  const FuseResult fused = RunFuse(optical_log, recon.snapshot, fuse_config, fuse_dir);

  CHECK(fused.frames_used == 4);
  REQUIRE(!fused.cloud.points.empty());
  CHECK(fused.cloud.colors.size() == fused.cloud.points.size());
  CHECK(fs::exists(fs::path(fuse_dir) / "cloud.ply"));

  // All fused points lie near the carved sphere surface.
  const Eigen::Vector3d center(0.0, 0.0, 0.4);
  for (const Eigen::Vector3d& p : fused.cloud.points) {
    CHECK(std::abs((p - center).norm() - 0.25) < 3.0 * config.carve.voxel_size);
  }
}

TEST_CASE("fuse with no optical frames returns an empty cloud") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = WriteSphereLog(dir, config, 8);
  const FrameLog log = ReadFrameLog(log_dir);
  const ReconstructResult recon = RunReconstruct(log, config);
  const FuseResult fused = RunFuse(log, recon.snapshot, config);
  CHECK(fused.frames_used == 0);
  CHECK(fused.cloud.points.empty());
}

TEST_CASE("mesh from snapshot is smoothed and carries normals") {
  TempDir dir;
  const PipelineConfig config = SmallConfig();
  const std::string log_dir = WriteSphereLog(dir, config, 24);
  const FrameLog log = ReadFrameLog(log_dir);
  const ReconstructResult recon = RunReconstruct(log, config);

  const TriangleMesh mesh = MeshFromSnapshot(recon.snapshot, config.smooth);
  REQUIRE(!mesh.triangles.empty());
  CHECK(mesh.normals.size() == mesh.vertices.size());
}

TEST_CASE("bench produces one point per size and a slope") {
  PipelineConfig config = DefaultConfig();
  const BenchResult result = RunBench(config, {0.08, 0.05}, 8, 3);
  REQUIRE(result.points.size() == 2);
  CHECK(result.points[0].voxel_size == 0.08);
  CHECK(result.points[1].voxel_size == 0.05);
  for (const BenchPoint& p : result.points) {
    CHECK(p.frames == 8);
    CHECK(p.total_seconds > 0.0);
    CHECK(p.mean_frame_seconds > 0.0);
    CHECK(p.occupied_voxels > 0);
  }
  // Finer voxels cost more.
  CHECK(result.points[1].total_seconds > result.points[0].total_seconds);

  const std::string csv = BenchCsv(result);
  CHECK(csv.find("voxel_size") != std::string::npos);
  CHECK(csv.find("0.05") != std::string::npos);
  const std::string table = BenchTable(result);
  CHECK(table.find("0.05") != std::string::npos);
}

TEST_CASE("bench validates its arguments") {
  PipelineConfig config = DefaultConfig();
  CHECK_THROWS(RunBench(config, {}, 10, 1));
  CHECK_THROWS(RunBench(config, {0.05}, 0, 1));
}

}  // namespace
}  // namespace oasis
