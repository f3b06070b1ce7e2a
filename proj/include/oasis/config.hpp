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

#ifndef OASIS_CONFIG_HPP_
#define OASIS_CONFIG_HPP_

#include <string>

#include <Eigen/Core>

#include "oasis/carve.hpp"
#include "oasis/fusion.hpp"
#include "oasis/geometry.hpp"

namespace oasis {

struct PreprocessParams {
  int background_bins = 10;  // leading range-bin rows used for noise stats
  int half_window = 5;       // rolling row-band half width
};

struct SmoothParams {
  int iterations = 3;
  double lambda = 0.5;
};

// Everything the reconstruction and fusion stages need that is not carried
// by the frame log itself.
struct PipelineConfig {
  SonarIntrinsics sonar;
  CameraIntrinsics camera;
  // Camera mount relative to the sonar; used by producers that derive the
  // camera pose from the sonar pose.
  Pose camera_from_sonar;
  CarveConfig carve;
  PreprocessParams preprocess;
  Eigen::Vector3d workspace_min{-1.3, -1.3, -0.2};
  Eigen::Vector3d workspace_max{1.3, 1.3, 1.4};
  MaskParams mask;
  SmoothParams smooth;

  void Validate() const;  // throws ConfigError
};

// Default rig: the survey sonar with a camera mounted above it, pitched up
// so the optical axis meets the sonar fan center at working distance.
PipelineConfig DefaultConfig();

// JSON round trip. Load/Parse throw ConfigError on unknown keys, malformed
// values, or failed validation; absent keys keep their defaults.
PipelineConfig LoadConfig(const std::string& path);
PipelineConfig ParseConfig(const std::string& json_text, const std::string& context);
std::string ConfigToJson(const PipelineConfig& config);
void SaveConfig(const std::string& path, const PipelineConfig& config);

}  // namespace oasis

#endif  // OASIS_CONFIG_HPP_
