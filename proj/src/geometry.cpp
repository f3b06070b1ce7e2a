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

#include "oasis/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace oasis {

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!IsValid(1e-6)) {
    throw std::invalid_argument("Pose: rotation is not orthonormal with det +1");
  }
  Reorthonormalize();
}

Pose Pose::FromQuaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("Pose: quaternion is not unit length");
  }
  Pose pose;
  pose.rotation_ = q.normalized().toRotationMatrix();
  pose.translation_ = t;
  return pose;
}

Pose Pose::FromQuaternionWxyz(double w, double x, double y, double z,
                              const Eigen::Vector3d& t) {
  return FromQuaternion(Eigen::Quaterniond(w, x, y, z), t);
}

Pose Pose::operator*(const Pose& other) const {
  Pose result;
  result.rotation_ = rotation_ * other.rotation_;
  result.translation_ = rotation_ * other.translation_ + translation_;
  result.Reorthonormalize();
  return result;
}

Pose Pose::Inverse() const {
  Pose result;
  result.rotation_ = rotation_.transpose();
  result.translation_ = -(rotation_.transpose() * translation_);
  return result;
}

double Pose::OrthonormalityError() const {
  const Eigen::Matrix3d gram = rotation_ * rotation_.transpose();
  const double gram_err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return gram_err + std::abs(rotation_.determinant() - 1.0);
}

bool Pose::IsValid(double tolerance) const { return OrthonormalityError() <= tolerance; }

void Pose::Reorthonormalize() {
  // Compositions accumulate round-off; snap back through the quaternion when
  // drift becomes measurable so chains of 1e4 composes stay within 1e-9.
  if (OrthonormalityError() > 1e-12) {
    rotation_ = Eigen::Quaterniond(rotation_).normalized().toRotationMatrix();
  }
}

Eigen::Vector3d SphericalToSensor(double range, double azimuth, double elevation) {
  const double ce = std::cos(elevation);
  return Eigen::Vector3d(range * ce * std::cos(azimuth), range * ce * std::sin(azimuth),
                         range * std::sin(elevation));
}

void SonarIntrinsics::Validate() const {
  if (beams < 1 || range_bins < 1) {
    throw std::invalid_argument("SonarIntrinsics: beam/bin counts must be >= 1");
  }
  if (!(hfov > 0.0 && hfov < M_PI) || !(vfov > 0.0 && vfov < M_PI)) {
    throw std::invalid_argument("SonarIntrinsics: fov must be in (0, pi)");
  }
  if (!(min_range >= 0.0 && min_range < max_range)) {
    throw std::invalid_argument("SonarIntrinsics: require 0 <= min_range < max_range");
  }
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0 && fy > 0.0)) {
    throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
  }
  if (width < 1 || height < 1 || cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw std::invalid_argument("CameraIntrinsics: principal point outside image");
  }
}

}  // namespace oasis
