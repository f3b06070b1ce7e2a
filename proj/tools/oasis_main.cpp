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
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oasis/config.hpp"
#include "oasis/errors.hpp"
#include "oasis/frame_log.hpp"
#include "oasis/grid_io.hpp"
#include "oasis/pipeline.hpp"
#include "oasis/ply_io.hpp"
#include "oasis/sim.hpp"

namespace {

oasis::PipelineConfig ResolveConfig(const std::string& config_path,
                                    const std::string& log_dir) {
  if (!config_path.empty()) return oasis::LoadConfig(config_path);
  if (!log_dir.empty()) {
    const std::string in_log = log_dir + "/config.json";
    if (std::filesystem::exists(in_log)) return oasis::LoadConfig(in_log);
  }
  return oasis::DefaultConfig();
}

int RunSimulate(const std::string& out_dir, const std::string& config_path,
                std::uint64_t seed, int optical_every, int elevation_samples) {
  oasis::PipelineConfig config = ResolveConfig(config_path, "");
  const oasis::Scene scene = oasis::DefaultTankScene();
  const std::vector<oasis::TimedPose> trajectory =
      oasis::SweepTrajectory(oasis::DefaultTankSweep());
  const oasis::SonarNoiseParams noise;
  const oasis::Rgb water_background{4, 8, 12};

  std::filesystem::create_directories(out_dir);
  oasis::FrameLogWriter writer(out_dir);
  int sonar_count = 0, optical_count = 0;
  for (size_t i = 0; i < trajectory.size(); ++i) {
    oasis::SonarFrame frame =
        oasis::RenderSonar(scene, config.sonar, trajectory[i].pose, noise,
                           elevation_samples, seed + static_cast<std::uint64_t>(i));
    frame.timestamp = trajectory[i].timestamp;
    writer.AddSonar(frame);
    ++sonar_count;

    if (optical_every > 0 && i % static_cast<size_t>(optical_every) == 0) {
      const oasis::Pose camera_pose = trajectory[i].pose * config.camera_from_sonar;
      oasis::OpticalRender render =
          oasis::RenderOptical(scene, config.camera, camera_pose, water_background);
      render.frame.timestamp = trajectory[i].timestamp;
      oasis::Mask mask(render.frame.pixels.rows(), render.frame.pixels.cols(), 0);
      for (int r = 0; r < mask.rows(); ++r) {
        for (int c = 0; c < mask.cols(); ++c) {
          if (render.primitive_ids.at(r, c) >= 0) mask.at(r, c) = 255;
        }
      }
      writer.AddOptical(render.frame, &mask);
      ++optical_count;
    }
  }
  writer.Close();
  oasis::SaveConfig(out_dir + "/config.json", config);
  std::cout << "simulate: wrote " << sonar_count << " sonar and " << optical_count
            << " optical frames to " << out_dir << "\n";
  return 0;
}

int RunReconstructCmd(const std::string& log_dir, const std::string& out_dir,
                      const std::string& config_path) {
  const oasis::PipelineConfig config = ResolveConfig(config_path, log_dir);
  const oasis::FrameLog log = oasis::ReadFrameLog(log_dir);
  const oasis::ReconstructResult result = oasis::RunReconstruct(log, config, out_dir);
  std::cout << "reconstruct: " << result.frames_integrated << " frames integrated, "
            << result.frames_gated << " gated, " << result.frames_malformed
            << " malformed; mean " << 1e3 * result.mean_frame_seconds
            << " ms/frame; " << result.snapshot.OccupiedCount()
            << " occupied voxels\n";
  std::cout << "reconstruct: outputs in " << out_dir << "\n";
  return 0;
}

int RunFuseCmd(const std::string& log_dir, const std::string& grid_path,
               const std::string& out_dir, const std::string& config_path) {
  const oasis::PipelineConfig config = ResolveConfig(config_path, log_dir);
  const oasis::FrameLog log = oasis::ReadFrameLog(log_dir);
  const oasis::GridSnapshot snapshot = oasis::ReadGridSnapshot(grid_path);
  const oasis::FuseResult result = oasis::RunFuse(log, snapshot, config, out_dir);
  std::cout << "fuse: " << result.cloud.points.size() << " points from "
            << result.frames_used << " frames (" << result.frames_skipped
            << " skipped)\n";
  std::cout << "fuse: outputs in " << out_dir << "\n";
  return 0;
}

int RunBenchCmd(const std::vector<double>& voxel_sizes, int frames,
                const std::string& csv_path, std::uint64_t seed,
                const std::string& config_path) {
  const oasis::PipelineConfig config = ResolveConfig(config_path, "");
  const oasis::BenchResult result = oasis::RunBench(config, voxel_sizes, frames, seed);
  std::cout << oasis::BenchTable(result);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw oasis::InputError(csv_path + ": cannot open for writing");
    out << oasis::BenchCsv(result);
    std::cout << "bench: csv written to " << csv_path << "\n";
  }
  return 0;
}

int RunExportCmd(const std::string& grid_path, const std::string& ply_path, bool mesh,
                 bool ascii, const std::string& config_path) {
  const oasis::GridSnapshot snapshot = oasis::ReadGridSnapshot(grid_path);
  const oasis::PlyFormat format =
      ascii ? oasis::PlyFormat::kAscii : oasis::PlyFormat::kBinaryLittleEndian;
  if (mesh) {
    const oasis::PipelineConfig config = ResolveConfig(config_path, "");
    oasis::WriteMeshPly(ply_path, oasis::MeshFromSnapshot(snapshot, config.smooth),
                        format);
  } else {
    oasis::WritePointsPly(ply_path, snapshot.OccupiedCenters(), format);
  }
  std::cout << "export: wrote " << ply_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sonar voxel carving, meshing and optical fusion"};
  app.require_subcommand(1);

  std::string out_dir, log_dir, config_path, grid_path, ply_path, csv_path;
  std::uint64_t seed = 1;
  int optical_every = 16;
  int elevation_samples = 32;
  int frames = 100;
  std::vector<double> voxel_sizes = {0.05, 0.04, 0.03, 0.02, 0.01};
  bool export_mesh = false, export_ascii = false;

  CLI::App* simulate = app.add_subcommand("simulate", "Render a synthetic survey log");
  simulate->add_option("--out", out_dir, "Output log directory")->required();
  simulate->add_option("--config", config_path, "Pipeline config JSON");
  simulate->add_option("--seed", seed, "Noise seed");
  simulate->add_option("--optical-every", optical_every,
                       "Optical frame every N sonar poses (0 disables)");
  simulate->add_option("--elevation-samples", elevation_samples,
                       "Rays per beam across the vertical aperture");

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "Carve a grid from a log");
  reconstruct->add_option("--log", log_dir, "Frame log directory")->required();
  reconstruct->add_option("--out", out_dir, "Output directory")->required();
  reconstruct->add_option("--config", config_path, "Pipeline config JSON");

  CLI::App* fuse = app.add_subcommand("fuse", "Color the carved surface from a log");
  fuse->add_option("--log", log_dir, "Frame log directory")->required();
  fuse->add_option("--grid", grid_path, "Carved grid (.oasg)")->required();
  fuse->add_option("--out", out_dir, "Output directory")->required();
  fuse->add_option("--config", config_path, "Pipeline config JSON");

  CLI::App* bench = app.add_subcommand("bench", "Time carving across voxel sizes");
  bench->add_option("--voxel-sizes", voxel_sizes, "Voxel sizes in meters")
      ->delimiter(',');
  bench->add_option("--frames", frames, "Synthetic frames to integrate");
  bench->add_option("--csv", csv_path, "Write results as CSV");
  bench->add_option("--seed", seed, "Noise seed");
  bench->add_option("--config", config_path, "Pipeline config JSON");

  CLI::App* export_cmd = app.add_subcommand("export", "Convert a grid to PLY");
  export_cmd->add_option("--grid", grid_path, "Carved grid (.oasg)")->required();
  export_cmd->add_option("--ply", ply_path, "Output PLY path")->required();
  export_cmd->add_flag("--mesh", export_mesh, "Export the smoothed isosurface mesh");
  export_cmd->add_flag("--ascii", export_ascii, "Write ASCII PLY");
  export_cmd->add_option("--config", config_path, "Pipeline config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (simulate->parsed()) {
      return RunSimulate(out_dir, config_path, seed, optical_every, elevation_samples);
    }
    if (reconstruct->parsed()) {
      return RunReconstructCmd(log_dir, out_dir, config_path);
    }
    if (fuse->parsed()) {
      return RunFuseCmd(log_dir, grid_path, out_dir, config_path);
    }
    if (bench->parsed()) {
      return RunBenchCmd(voxel_sizes, frames, csv_path, seed, config_path);
    }
    if (export_cmd->parsed()) {
      return RunExportCmd(grid_path, ply_path, export_mesh, export_ascii, config_path);
    }
  } catch (const oasis::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const oasis::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
