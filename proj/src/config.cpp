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

#include "oasis/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <Eigen/Geometry>

#include "oasis/errors.hpp"

namespace oasis {

using nlohmann::json;

namespace {

void CheckKeys(const json& j, const std::set<std::string>& allowed,
               const std::string& context) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

double GetNumber(const json& j, const char* key, double fallback,
                 const std::string& context) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError(context + ": '" + key + "' must be a number");
  }
  return j[key].get<double>();
}

int GetInt(const json& j, const char* key, int fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw ConfigError(context + ": '" + key + "' must be an integer");
  }
  return j[key].get<int>();
}

Eigen::Vector3d GetVector3(const json& j, const char* key,
                           const Eigen::Vector3d& fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    throw ConfigError(context + ": '" + key + "' must be an array of 3 numbers");
  }
  return Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

Pose GetPose(const json& j, const char* key, const Pose& fallback,
             const std::string& context) {
  if (!j.contains(key)) return fallback;
  const json& p = j[key];
  CheckKeys(p, {"t", "q"}, context + "." + key);
  const Eigen::Vector3d t =
      GetVector3(p, "t", Eigen::Vector3d::Zero(), context + "." + key);
  if (!p.contains("q")) return Pose(Eigen::Matrix3d::Identity(), t);
  const json& q = p["q"];
  if (!q.is_array() || q.size() != 4) {
    throw ConfigError(context + "." + key + ": 'q' must be [w, x, y, z]");
  }
  const double w = q[0].get<double>(), x = q[1].get<double>(),
               y = q[2].get<double>(), z = q[3].get<double>();
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(std::abs(norm - 1.0) <= 1e-6)) {
    throw ConfigError(context + "." + key + ": quaternion is not unit length");
  }
  return Pose::FromQuaternionWxyz(w / norm, x / norm, y / norm, z / norm, t);
}

json PoseToJsonValue(const Pose& pose) {
  const Eigen::Quaterniond q = pose.quaternion();
  const Eigen::Vector3d& t = pose.translation();
  return json{{"t", {t.x(), t.y(), t.z()}}, {"q", {q.w(), q.x(), q.y(), q.z()}}};
}

}  // namespace

void PipelineConfig::Validate() const {
  try {
    sonar.Validate();
    camera.Validate();
    carve.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (preprocess.background_bins < 1 ||
      preprocess.background_bins > sonar.range_bins) {
    throw ConfigError("config: preprocess.background_bins out of range");
  }
  if (preprocess.half_window < 1) {
    throw ConfigError("config: preprocess.half_window must be >= 1");
  }
  if (!(workspace_min.array() < workspace_max.array()).all()) {
    throw ConfigError("config: workspace box is empty");
  }
  if (smooth.iterations < 0) {
    throw ConfigError("config: smooth.iterations must be >= 0");
  }
  if (!(smooth.lambda > 0.0 && smooth.lambda < 1.0)) {
    throw ConfigError("config: smooth.lambda must be in (0, 1)");
  }
  if (!(mask.threshold >= 0.0)) {
    throw ConfigError("config: mask.threshold must be >= 0");
  }
}

PipelineConfig DefaultConfig() {
  PipelineConfig config;

  // Camera above the sonar, pitched up so the optical axis crosses the
  // (down-pitched) sonar fan at working distance. Base alignment maps
  // camera +z to sonar +x, camera +x to sonar -y, camera +y to sonar -z.
  Eigen::Matrix3d base;
  base.col(0) = Eigen::Vector3d(0, -1, 0);
  base.col(1) = Eigen::Vector3d(0, 0, -1);
  base.col(2) = Eigen::Vector3d(1, 0, 0);
  const Eigen::Matrix3d pitch_up =
      Eigen::AngleAxisd(10.0 * kDegrees, Eigen::Vector3d::UnitX()).toRotationMatrix();
  config.camera_from_sonar = Pose(base * pitch_up, Eigen::Vector3d(0.0, 0.0, 0.05));
  return config;
}

PipelineConfig ParseConfig(const std::string& json_text, const std::string& context) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(context + ": config root must be an object");
  CheckKeys(j,
            {"sonar", "camera", "camera_from_sonar", "carve", "preprocess", "workspace",
             "mask", "smooth"},
            context);

  PipelineConfig config = DefaultConfig();

  if (j.contains("sonar")) {
    const json& s = j["sonar"];
    const std::string c = context + ".sonar";
    CheckKeys(s, {"beams", "range_bins", "hfov_deg", "vfov_deg", "min_range", "max_range"},
              c);
    config.sonar.beams = GetInt(s, "beams", config.sonar.beams, c);
    config.sonar.range_bins = GetInt(s, "range_bins", config.sonar.range_bins, c);
    config.sonar.hfov = GetNumber(s, "hfov_deg", config.sonar.hfov / kDegrees, c) * kDegrees;
    config.sonar.vfov = GetNumber(s, "vfov_deg", config.sonar.vfov / kDegrees, c) * kDegrees;
    config.sonar.min_range = GetNumber(s, "min_range", config.sonar.min_range, c);
    config.sonar.max_range = GetNumber(s, "max_range", config.sonar.max_range, c);
  }

  if (j.contains("camera")) {
    const json& s = j["camera"];
    const std::string c = context + ".camera";
    CheckKeys(s, {"fx", "fy", "cx", "cy", "width", "height"}, c);
    config.camera.fx = GetNumber(s, "fx", config.camera.fx, c);
    config.camera.fy = GetNumber(s, "fy", config.camera.fy, c);
    config.camera.cx = GetNumber(s, "cx", config.camera.cx, c);
    config.camera.cy = GetNumber(s, "cy", config.camera.cy, c);
    config.camera.width = GetInt(s, "width", config.camera.width, c);
    config.camera.height = GetInt(s, "height", config.camera.height, c);
  }

  config.camera_from_sonar =
      GetPose(j, "camera_from_sonar", config.camera_from_sonar, context);

  if (j.contains("carve")) {
    const json& s = j["carve"];
    const std::string c = context + ".carve";
    CheckKeys(s, {"ratio_threshold", "motion_gate", "voxel_size"}, c);
    config.carve.ratio_threshold =
        GetNumber(s, "ratio_threshold", config.carve.ratio_threshold, c);
    config.carve.motion_gate = GetNumber(s, "motion_gate", config.carve.motion_gate, c);
    config.carve.voxel_size = GetNumber(s, "voxel_size", config.carve.voxel_size, c);
  }

  if (j.contains("preprocess")) {
    const json& s = j["preprocess"];
    const std::string c = context + ".preprocess";
    CheckKeys(s, {"background_bins", "half_window"}, c);
    config.preprocess.background_bins =
        GetInt(s, "background_bins", config.preprocess.background_bins, c);
    config.preprocess.half_window =
        GetInt(s, "half_window", config.preprocess.half_window, c);
  }

  if (j.contains("workspace")) {
    const json& s = j["workspace"];
    const std::string c = context + ".workspace";
    CheckKeys(s, {"min", "max"}, c);
    config.workspace_min = GetVector3(s, "min", config.workspace_min, c);
    config.workspace_max = GetVector3(s, "max", config.workspace_max, c);
  }

  if (j.contains("mask")) {
    const json& s = j["mask"];
    const std::string c = context + ".mask";
    CheckKeys(s, {"mode", "threshold", "background_color"}, c);
    if (s.contains("mode")) {
      const std::string mode = s["mode"].get<std::string>();
      if (mode == "color_threshold") {
        config.mask.mode = MaskParams::Mode::kColorThreshold;
      } else if (mode == "external") {
        config.mask.mode = MaskParams::Mode::kExternal;
      } else {
        throw ConfigError(c + ": unknown mode '" + mode + "'");
      }
    }
    config.mask.threshold = GetNumber(s, "threshold", config.mask.threshold, c);
    if (s.contains("background_color")) {
      const Eigen::Vector3d bg =
          GetVector3(s, "background_color", Eigen::Vector3d::Zero(), c);
      for (int a = 0; a < 3; ++a) {
        if (bg[a] < 0.0 || bg[a] > 255.0) {
          throw ConfigError(c + ": background_color components must be in [0, 255]");
        }
      }
      config.mask.background_color = Rgb{static_cast<std::uint8_t>(bg[0]),
                                         static_cast<std::uint8_t>(bg[1]),
                                         static_cast<std::uint8_t>(bg[2])};
    }
  }

  if (j.contains("smooth")) {
    const json& s = j["smooth"];
    const std::string c = context + ".smooth";
    CheckKeys(s, {"iterations", "lambda"}, c);
    config.smooth.iterations = GetInt(s, "iterations", config.smooth.iterations, c);
    config.smooth.lambda = GetNumber(s, "lambda", config.smooth.lambda, c);
  }

  config.Validate();
  return config;
}

PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), path);
}

std::string ConfigToJson(const PipelineConfig& config) {
  json j;
  j["sonar"] = {{"beams", config.sonar.beams},
                {"range_bins", config.sonar.range_bins},
                {"hfov_deg", config.sonar.hfov / kDegrees},
                {"vfov_deg", config.sonar.vfov / kDegrees},
                {"min_range", config.sonar.min_range},
                {"max_range", config.sonar.max_range}};
  j["camera"] = {{"fx", config.camera.fx},   {"fy", config.camera.fy},
                 {"cx", config.camera.cx},   {"cy", config.camera.cy},
                 {"width", config.camera.width}, {"height", config.camera.height}};
  j["camera_from_sonar"] = PoseToJsonValue(config.camera_from_sonar);
  j["carve"] = {{"ratio_threshold", config.carve.ratio_threshold},
                {"motion_gate", config.carve.motion_gate},
                {"voxel_size", config.carve.voxel_size}};
  j["preprocess"] = {{"background_bins", config.preprocess.background_bins},
                     {"half_window", config.preprocess.half_window}};
  j["workspace"] = {
      {"min", {config.workspace_min.x(), config.workspace_min.y(), config.workspace_min.z()}},
      {"max", {config.workspace_max.x(), config.workspace_max.y(), config.workspace_max.z()}}};
  j["mask"] = {{"mode", config.mask.mode == MaskParams::Mode::kColorThreshold
                            ? "color_threshold"
                            : "external"},
               {"threshold", config.mask.threshold}};
  if (config.mask.background_color) {
    j["mask"]["background_color"] = {config.mask.background_color->r,
                                     config.mask.background_color->g,
                                     config.mask.background_color->b};
  }
  j["smooth"] = {{"iterations", config.smooth.iterations},
                 {"lambda", config.smooth.lambda}};
  return j.dump(2) + "\n";
}

void SaveConfig(const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << ConfigToJson(config);
  if (!out) throw ConfigError(path + ": write failed");
}

}  // namespace oasis
