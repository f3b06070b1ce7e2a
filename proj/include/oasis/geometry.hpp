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

#ifndef OASIS_GEOMETRY_HPP_
#define OASIS_GEOMETRY_HPP_

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace oasis {

// Radians per degree, for writing angle literals in degrees.
inline constexpr double kDegrees = M_PI / 180.0;

// Rigid-body transform mapping sensor-frame points into the world frame.
// Stored as rotation matrix + translation so batched point transforms are a
// single matrix multiply; quaternions are accepted at ingestion boundaries
// and converted.
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose Identity() { return Pose(); }
  static Pose FromQuaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);
  // Unit quaternion in (w, x, y, z) order, as used by the frame-log format.
  static Pose FromQuaternionWxyz(double w, double x, double y, double z,
                                 const Eigen::Vector3d& t);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation_); }

  // Composition: (a * b) maps p to a(b(p)).
  Pose operator*(const Pose& other) const;
  // Applies the transform: R * p + t.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }

  Pose Inverse() const;

  // Max deviation of R * R^T from identity plus |det - 1|.
  double OrthonormalityError() const;
  bool IsValid(double tolerance = 1e-9) const;

 private:
  void Reorthonormalize();

  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

inline Pose Compose(const Pose& a, const Pose& b) { return a * b; }
inline Eigen::Vector3d TransformPoint(const Pose& pose, const Eigen::Vector3d& p) {
  return pose * p;
}

// Sensor-frame convention: x forward, y left, z up. Azimuth rotates x toward
// y (positive left), elevation rotates toward +z (positive up).
Eigen::Vector3d SphericalToSensor(double range, double azimuth, double elevation);

// Multibeam imaging sonar model: `range_bins` rows (near to far) by `beams`
// columns (azimuth -hfov/2 to +hfov/2).
struct SonarIntrinsics {
  int beams = 512;
  int range_bins = 398;
  double hfov = 130.0 * kDegrees;  // radians
  double vfov = 20.0 * kDegrees;   // radians
  double min_range = 0.1;              // meters
  double max_range = 2.0;              // meters

  double RangeResolution() const { return (max_range - min_range) / range_bins; }
  double BeamWidth() const { return hfov / beams; }
  // Center range of a range bin / center azimuth of a beam column.
  double BinRange(int bin) const { return min_range + (bin + 0.5) * RangeResolution(); }
  double BeamAzimuth(int beam) const { return -hfov / 2.0 + (beam + 0.5) * BeamWidth(); }

  bool InFrustum(double range, double azimuth, double elevation) const {
    return range >= min_range && range <= max_range &&
           std::abs(azimuth) <= hfov / 2.0 && std::abs(elevation) <= vfov / 2.0;
  }

  void Validate() const;  // throws std::invalid_argument
};

// Pinhole camera, no distortion. Camera frame: +z forward, +x right, +y down.
struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  void Validate() const;  // throws std::invalid_argument
};

}  // namespace oasis

#endif  // OASIS_GEOMETRY_HPP_
