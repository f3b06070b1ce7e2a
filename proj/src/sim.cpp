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

#include "oasis/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Geometry>

namespace oasis {

namespace {

double PrimitiveSdf(const Primitive& primitive, const Eigen::Vector3d& local) {
  switch (primitive.kind) {
    case Primitive::Kind::kSphere:
      return local.norm() - primitive.size.x();
    case Primitive::Kind::kBox: {
      const Eigen::Vector3d d = local.cwiseAbs() - 0.5 * primitive.size;
      const Eigen::Vector3d outside = d.cwiseMax(0.0);
      return outside.norm() + std::min(d.maxCoeff(), 0.0);
    }
    case Primitive::Kind::kPlane:
      return local.z();
    case Primitive::Kind::kCylinderShell: {
      // Solid of revolution: a rectangle in the (radius, z) half plane.
      const double rho = std::hypot(local.x(), local.y());
      const double inner = primitive.size.x();
      const double thickness = primitive.size.y();
      const double height = primitive.size.z();
      const double ex = std::abs(rho - (inner + 0.5 * thickness)) - 0.5 * thickness;
      const double ez = std::abs(local.z() - 0.5 * height) - 0.5 * height;
      const double ox = std::max(ex, 0.0);
      const double oz = std::max(ez, 0.0);
      return std::hypot(ox, oz) + std::min(std::max(ex, ez), 0.0);
    }
  }
  return std::numeric_limits<double>::max();
}

constexpr double kHitEpsilon = 1e-4;
constexpr double kMinStep = 1e-4;
constexpr int kMaxTraceSteps = 400;

}  // namespace

void Scene::Add(const Primitive& primitive) {
  primitives_.push_back(primitive);
  world_to_local_.push_back(primitive.pose.Inverse());
}

double Scene::Sdf(const Eigen::Vector3d& point, int* hit_id) const {
  double best = std::numeric_limits<double>::max();
  int best_id = -1;
  for (size_t i = 0; i < primitives_.size(); ++i) {
    const double d = PrimitiveSdf(primitives_[i], world_to_local_[i] * point);
    if (d < best) {
      best = d;
      best_id = static_cast<int>(i);
    }
  }
  if (hit_id != nullptr) *hit_id = best_id;
  return best;
}

Eigen::Vector3d Scene::Normal(const Eigen::Vector3d& point) const {
  const double h = 1e-5;
  Eigen::Vector3d n;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d lo = point, hi = point;
    lo[a] -= h;
    hi[a] += h;
    n[a] = Sdf(hi) - Sdf(lo);
  }
  const double norm = n.norm();
  return norm > 0.0 ? Eigen::Vector3d(n / norm) : Eigen::Vector3d::UnitZ();
}

Scene::Hit Scene::Trace(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
                        double max_range) const {
  if (primitives_.empty()) return {};
  double t = kMinStep;
  for (int step = 0; step < kMaxTraceSteps; ++step) {
    if (t > max_range) break;
    int id = -1;
    const double d = Sdf(origin + t * direction, &id);
    if (d < kHitEpsilon) return {t, id};
    t += std::max(d, kMinStep);
  }
  return {};
}

SonarFrame RenderSonar(const Scene& scene, const SonarIntrinsics& intrinsics,
                       const Pose& pose, const SonarNoiseParams& noise,
                       int elevation_samples, std::uint64_t seed) {
  intrinsics.Validate();
  if (elevation_samples < 1) {
    throw std::invalid_argument("RenderSonar: elevation_samples must be positive");
  }

  const int rows = intrinsics.range_bins;
  const int cols = intrinsics.beams;
  std::vector<double> echo(static_cast<size_t>(rows) * cols, 0.0);

  const Eigen::Matrix3d& rot = pose.rotation();
  const Eigen::Vector3d& origin = pose.translation();
  const double bin_size = intrinsics.RangeResolution();
  for (int beam = 0; beam < cols; ++beam) {
    const double azimuth = intrinsics.BeamAzimuth(beam);
    for (int s = 0; s < elevation_samples; ++s) {
      const double elevation =
          elevation_samples == 1
              ? 0.0
              : -intrinsics.vfov / 2.0 +
                    intrinsics.vfov * s / (elevation_samples - 1);
      const Eigen::Vector3d dir = rot * SphericalToSensor(1.0, azimuth, elevation);
      const Scene::Hit hit = scene.Trace(origin, dir, intrinsics.max_range);
      if (hit.id < 0 || hit.range < intrinsics.min_range) continue;
      const int bin =
          static_cast<int>((hit.range - intrinsics.min_range) / bin_size);
      if (bin < 0 || bin >= rows) continue;
      const Eigen::Vector3d normal = scene.Normal(origin + hit.range * dir);
      const double incidence = std::min(1.0, std::abs(dir.dot(normal)));
      const double intensity = 255.0 * scene.At(hit.id).reflectivity * incidence;
      double& cell = echo[static_cast<size_t>(bin) * cols + beam];
      cell = std::max(cell, intensity);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (noise.dropout_prob > 0.0) {
    for (double& v : echo) {
      if (v > 0.0 && uniform(rng) < noise.dropout_prob) v = 0.0;
    }
  }

  if (noise.ring_gain > 0.0) {
    const std::vector<double> clean = echo;
    for (int bin = 0; bin < rows; ++bin) {
      for (int beam = 0; beam < cols; ++beam) {
        const double v = clean[static_cast<size_t>(bin) * cols + beam];
        if (v <= 0.0) continue;
        double gain = 1.0;
        for (int j = 1; j <= 3; ++j) {
          gain *= noise.ring_gain;
          if (bin - j >= 0) echo[static_cast<size_t>(bin - j) * cols + beam] += v * gain;
          if (bin + j < rows) echo[static_cast<size_t>(bin + j) * cols + beam] += v * gain;
        }
      }
    }
  }

  std::normal_distribution<double> speckle(1.0, noise.speckle_sigma / 255.0);
  std::normal_distribution<double> background(noise.background_mean,
                                              noise.background_sigma);
  SonarFrame frame;
  frame.intrinsics = intrinsics;
  frame.pose = pose;
  frame.data = Image2D<std::uint8_t>(rows, cols, 0);
  for (int bin = 0; bin < rows; ++bin) {
    for (int beam = 0; beam < cols; ++beam) {
      double v = echo[static_cast<size_t>(bin) * cols + beam];
      if (noise.speckle_sigma > 0.0) v *= std::max(0.0, speckle(rng));
      if (noise.background_sigma > 0.0 || noise.background_mean > 0.0) {
        v += background(rng);
      }
      frame.data.at(bin, beam) =
          static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return frame;
}

OpticalRender RenderOptical(const Scene& scene, const CameraIntrinsics& intrinsics,
                            const Pose& pose, const Rgb& background) {
  intrinsics.Validate();
  OpticalRender out;
  out.frame.intrinsics = intrinsics;
  out.frame.pose = pose;
  out.frame.pixels = Image2D<Rgb>(intrinsics.height, intrinsics.width, background);
  out.primitive_ids = Image2D<std::int32_t>(intrinsics.height, intrinsics.width, -1);
  out.depth.intrinsics = intrinsics;
  out.depth.depths =
      Image2D<float>(intrinsics.height, intrinsics.width, DepthImage::kNoHit);

  const Eigen::Matrix3d& rot = pose.rotation();
  const Eigen::Vector3d& origin = pose.translation();
  // Far enough to cross the whole tank from any survey pose.
  const double max_range = 10.0;
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      const Eigen::Vector3d dir_cam((u - intrinsics.cx) / intrinsics.fx,
                                    (v - intrinsics.cy) / intrinsics.fy, 1.0);
      const double norm = dir_cam.norm();
      const Eigen::Vector3d dir = rot * (dir_cam / norm);
      const Scene::Hit hit = scene.Trace(origin, dir, max_range);
      if (hit.id < 0) continue;

      const Eigen::Vector3d point = origin + hit.range * dir;
      const Eigen::Vector3d normal = scene.Normal(point);
      // Headlight at the camera with an ambient floor.
      const double lambert = std::max(0.0, -dir.dot(normal));
      const double shade = 0.3 + 0.7 * lambert;
      const Rgb& base = scene.At(hit.id).color;
      out.frame.pixels.at(v, u) =
          Rgb{static_cast<std::uint8_t>(std::lround(base.r * shade)),
              static_cast<std::uint8_t>(std::lround(base.g * shade)),
              static_cast<std::uint8_t>(std::lround(base.b * shade))};
      out.primitive_ids.at(v, u) = hit.id;
      // Ray parameter is arc length; depth images store camera-z distance.
      out.depth.depths.at(v, u) = static_cast<float>(hit.range / norm);
    }
  }
  return out;
}

void SweepParams::Validate() const {
  if (!(yaw_max >= yaw_min)) {
    throw std::invalid_argument("SweepParams: yaw_max must be >= yaw_min");
  }
  if (!(angular_step > 0.0)) {
    throw std::invalid_argument("SweepParams: angular_step must be positive");
  }
  if (!(frame_rate > 0.0)) {
    throw std::invalid_argument("SweepParams: frame_rate must be positive");
  }
  if (pitch_levels.empty()) {
    throw std::invalid_argument("SweepParams: pitch_levels must not be empty");
  }
  if (!(boom_length >= 0.0) || !(roll_axis_offset >= 0.0)) {
    throw std::invalid_argument("SweepParams: arm offsets must be non-negative");
  }
}

namespace {

Pose RotationPose(const Eigen::Vector3d& axis, double angle) {
  return Pose(Eigen::AngleAxisd(angle, axis).toRotationMatrix(),
              Eigen::Vector3d::Zero());
}

}  // namespace

std::vector<TimedPose> SweepTrajectory(const SweepParams& params) {
  params.Validate();

  const double span = params.yaw_max - params.yaw_min;
  const int steps = std::max(1, static_cast<int>(std::lround(span / params.angular_step)));

  const Pose boom(Eigen::Matrix3d::Identity(),
                  Eigen::Vector3d(params.boom_length, 0.0, 0.0));
  const Pose offset(Eigen::Matrix3d::Identity(),
                    Eigen::Vector3d(0.0, 0.0, params.roll_axis_offset));

  std::vector<TimedPose> trajectory;
  trajectory.reserve(params.pitch_levels.size() * 2 * (steps + 1));
  double time = 0.0;
  for (const double pitch : params.pitch_levels) {
    const Pose tilt = RotationPose(Eigen::Vector3d::UnitY(), pitch);
    for (int pass = 0; pass < 2; ++pass) {
      const Pose roll = RotationPose(Eigen::Vector3d::UnitX(), params.roll_pair[pass]);
      for (int i = 0; i <= steps; ++i) {
        const double fraction = static_cast<double>(i) / steps;
        const double yaw = pass == 0 ? params.yaw_min + span * fraction
                                     : params.yaw_max - span * fraction;
        const Pose pose = params.center * RotationPose(Eigen::Vector3d::UnitZ(), yaw) *
                          tilt * boom * roll * offset;
        trajectory.push_back({time, pose});
        time += 1.0 / params.frame_rate;
      }
    }
  }
  return trajectory;
}

Scene DefaultTankScene() {
  Scene scene;

  Primitive floor;
  floor.kind = Primitive::Kind::kPlane;
  floor.pose = Pose::Identity();
  floor.reflectivity = 0.6;
  floor.color = Rgb{120, 130, 140};
  scene.Add(floor);

  Primitive wall;
  wall.kind = Primitive::Kind::kCylinderShell;
  wall.pose = Pose::Identity();
  wall.size = Eigen::Vector3d(1.05, 0.06, 1.5);
  wall.reflectivity = 0.9;
  wall.color = Rgb{200, 200, 190};
  scene.Add(wall);

  Primitive crate;
  crate.kind = Primitive::Kind::kBox;
  crate.pose = Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.45, 0.10, 0.1645));
  crate.size = Eigen::Vector3d::Constant(0.329);
  crate.reflectivity = 0.8;
  crate.color = Rgb{230, 80, 60};
  scene.Add(crate);

  return scene;
}

std::vector<TimedPose> SweepTrajectory(const std::vector<SweepParams>& sweeps) {
  std::vector<TimedPose> trajectory;
  double offset = 0.0;
  for (const SweepParams& sweep : sweeps) {
    std::vector<TimedPose> part = SweepTrajectory(sweep);
    for (TimedPose& timed : part) {
      timed.timestamp += offset;
      trajectory.push_back(timed);
    }
    if (!trajectory.empty()) {
      offset = trajectory.back().timestamp + 1.0 / sweep.frame_rate;
    }
  }
  return trajectory;
}

namespace {

SweepParams TankPivot(double x, double y, double heading) {
  SweepParams params;
  params.center = Pose(Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ())
                           .toRotationMatrix(),
                       Eigen::Vector3d(x, y, 0.8));
  return params;
}

}  // namespace

std::vector<SweepParams> DefaultTankSweep() {
  // Pivot height and boom length keep the sensor above the crate at the
  // steepest pitch and inside the wall at full boom reach.
  //
  // Three pivots ring the crate facing it, then four pivots near the tank
  // center face each compass direction to image the wall band close and
  // head-on. A frontal short-range view tightens the wall: the slant-range
  // spread of a vertical surface across the fan grows with distance, so
  // distant oblique views smear the wall inward while near views pin it.
  std::vector<SweepParams> sweeps = {TankPivot(-0.35, 0.00, 0.0),
                                     TankPivot(0.13, 0.43, -45.0 * kDegrees),
                                     TankPivot(0.30, -0.33, 70.0 * kDegrees)};
  // Steep fans dip below the floor before they reach the far wall, so the
  // crate orbits stay at 30 degrees and up to keep their returns local.
  for (SweepParams& crate : sweeps) {
    crate.pitch_levels = {45.0 * kDegrees, 30.0 * kDegrees};
  }
  // Close enough that the whole orbit keeps the facing wall within half a
  // meter, where the fan's slant spread stays under one voxel.
  const double wall_pitches[2] = {30.0 * kDegrees, 15.0 * kDegrees};
  for (int side = 0; side < 4; ++side) {
    const double heading = 90.0 * kDegrees * side;
    SweepParams wall = TankPivot(0.35 * std::cos(heading), 0.35 * std::sin(heading),
                                 heading);
    wall.pitch_levels.assign(wall_pitches, wall_pitches + 2);
    sweeps.push_back(wall);
  }
  return sweeps;
}

}  // namespace oasis
