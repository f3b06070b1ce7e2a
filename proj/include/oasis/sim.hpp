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

#ifndef OASIS_SIM_HPP_
#define OASIS_SIM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "oasis/fusion.hpp"
#include "oasis/geometry.hpp"
#include "oasis/image.hpp"
#include "oasis/preprocess.hpp"

namespace oasis {

// Signed-distance primitives used by the synthetic test-tank renderer.
// The interpretation of `size` depends on the kind:
//   kSphere        size.x() is the radius.
//   kBox           size holds the full extents along the local axes.
//   kPlane         solid half space local z <= 0; size is ignored.
//   kCylinderShell vertical tube from local z = 0 to z = size.z(), inner
//                  radius size.x(), wall thickness size.y().
struct Primitive {
  enum class Kind { kSphere, kBox, kPlane, kCylinderShell };

  Kind kind = Kind::kSphere;
  Pose pose;
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double reflectivity = 0.8;
  Rgb color{200, 200, 200};
};

class Scene {
 public:
  void Add(const Primitive& primitive);

  int Count() const { return static_cast<int>(primitives_.size()); }
  const Primitive& At(int index) const { return primitives_[index]; }

  // Signed distance to the nearest surface. If hit_id is non-null it
  // receives the index of the closest primitive.
  double Sdf(const Eigen::Vector3d& point, int* hit_id = nullptr) const;

  Eigen::Vector3d Normal(const Eigen::Vector3d& point) const;

  struct Hit {
    double range = -1.0;  // arc length along the ray, negative on miss
    int id = -1;
  };

  // Sphere-traces a ray with unit direction up to max_range.
  Hit Trace(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
            double max_range) const;

 private:
  std::vector<Primitive> primitives_;
  std::vector<Pose> world_to_local_;
};

// Artifact model applied to the clean echo image, in order: dropout of
// individual returns, range ringing around strong returns, multiplicative
// speckle, then additive background noise.
struct SonarNoiseParams {
  double dropout_prob = 0.05;
  double ring_gain = 0.25;       // per-bin falloff of the ringing tails
  double speckle_sigma = 20.0;   // intensity units, scaled by 1/255
  double background_mean = 10.0;
  // Quantization-limited reverberation floor. The row gate in the
  // binarizer keeps any row whose max clears mean + 2 sigma; with 512 beams
  // per row, a wide Gaussian floor puts its max above that in every row, so
  // a quiet-tank floor must stay within quantization width.
  double background_sigma = 0.1;
};

// Renders one polar echo image by casting a fan of rays per beam across the
// vertical aperture and keeping the strongest return per range bin. The
// result carries the given pose; the timestamp is left for the caller.
SonarFrame RenderSonar(const Scene& scene, const SonarIntrinsics& intrinsics,
                       const Pose& pose, const SonarNoiseParams& noise,
                       int elevation_samples, std::uint64_t seed);

struct OpticalRender {
  OpticalFrame frame;
  Image2D<std::int32_t> primitive_ids;  // -1 where no surface was hit
  DepthImage depth;
};

// Renders a shaded color image with a headlight at the camera, plus the
// per-pixel primitive index and true depth used by the tests.
OpticalRender RenderOptical(const Scene& scene, const CameraIntrinsics& intrinsics,
                            const Pose& pose, const Rgb& background);

struct TimedPose {
  double timestamp = 0.0;
  Pose pose;
};

// Arm-style survey pattern: for every pitch level the sensor yaws from
// yaw_min to yaw_max and back, flipping between the two roll angles at the
// turn. The sensor sits boom_length out from the yaw axis and
// roll_axis_offset off the roll axis, so every consecutive pose pair,
// including the roll flips, moves the sensor origin.
struct SweepParams {
  Pose center;
  double yaw_min = -70.0 * kDegrees;
  double yaw_max = 70.0 * kDegrees;
  std::vector<double> pitch_levels = {45.0 * kDegrees, 30.0 * kDegrees,
                                      15.0 * kDegrees};
  double roll_pair[2] = {0.0, 180.0 * kDegrees};
  double boom_length = 0.55;
  double roll_axis_offset = 0.06;
  double angular_step = 2.0 * kDegrees;
  double frame_rate = 10.0;

  void Validate() const;
};

std::vector<TimedPose> SweepTrajectory(const SweepParams& params);

// Concatenates the sweeps in order, continuing the timestamps across the
// transitions at the first sweep's frame spacing.
std::vector<TimedPose> SweepTrajectory(const std::vector<SweepParams>& sweeps);

// Cylindrical test tank: flat floor, tube wall of 1.05 m inner radius, and
// a 0.329 m crate resting on the floor off center.
Scene DefaultTankScene();

// Survey of the tank from three pivots ringing the crate, each facing it,
// so the crate and the wall band behind it are insonified from viewpoints
// roughly 120 degrees apart. Elevation-ambiguous returns are only carved
// away where viewpoints genuinely disagree, so the pivot spread is what
// buys the vertical resolution.
std::vector<SweepParams> DefaultTankSweep();

}  // namespace oasis

#endif  // OASIS_SIM_HPP_
