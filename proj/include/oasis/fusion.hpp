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

#ifndef OASIS_FUSION_HPP_
#define OASIS_FUSION_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "oasis/geometry.hpp"
#include "oasis/image.hpp"
#include "oasis/mesh.hpp"

namespace oasis {

struct OpticalFrame {
  Image2D<Rgb> pixels;
  CameraIntrinsics intrinsics;
  Pose pose;  // world <- camera
  double timestamp = 0.0;

  void Validate() const;
};

// Per-pixel depth along the camera +z axis, meters. 0 marks no hit.
struct DepthImage {
  static constexpr float kNoHit = 0.0f;
  Image2D<float> depths;
  CameraIntrinsics intrinsics;
};

// Boolean image; nonzero means selected.
using Mask = Image2D<std::uint8_t>;

struct ColoredPointCloud {
  std::vector<Eigen::Vector3d> points;  // world frame
  std::vector<Rgb> colors;
};

// Ray caster for virtual-camera depth images, with a bounding-volume
// hierarchy built once per mesh so many frames can be rendered against the
// same reconstruction.
class DepthRenderer {
 public:
  explicit DepthRenderer(const TriangleMesh& mesh);

  // Pixel (u, v) casts the ray d * ((u - cx)/fx, (v - cy)/fy, 1) in camera
  // coordinates (+z forward, +x right, +y down); the recorded depth is the
  // camera-frame z of the nearest triangle hit.
  DepthImage Render(const CameraIntrinsics& intrinsics, const Pose& pose) const;

  // Nearest hit along origin + t * direction, as the parameter t. Negative
  // when nothing is hit.
  double CastRay(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) const;

  bool empty() const { return triangles_.empty(); }

 private:
  struct Node {
    Eigen::Vector3f box_min, box_max;
    std::uint32_t left = 0;   // child index, or first triangle for leaves
    std::uint32_t count = 0;  // 0 for inner nodes, triangle count for leaves
  };
  struct PackedTriangle {
    Eigen::Vector3d a, edge_ab, edge_ac;
  };

  std::vector<Node> nodes_;
  std::vector<PackedTriangle> triangles_;
};

inline DepthImage RenderDepth(const TriangleMesh& mesh, const CameraIntrinsics& intrinsics,
                              const Pose& pose) {
  return DepthRenderer(mesh).Render(intrinsics, pose);
}

struct MaskParams {
  enum class Mode { kColorThreshold, kExternal };
  Mode mode = Mode::kColorThreshold;
  // Reference background color; when unset, the median of the frame border.
  std::optional<Rgb> background_color;
  double threshold = 60.0;  // Euclidean RGB distance
};

// Foreground = pixels whose color is farther than `threshold` from the
// background color. The learned-segmentation stand-in; external per-frame
// masks are handled at the pipeline level.
Mask ForegroundMask(const OpticalFrame& frame, const MaskParams& params);

// True exactly where the depth image has a valid hit.
Mask DepthValidityMask(const DepthImage& depth);

Mask MaskIntersect(const Mask& a, const Mask& b);
size_t MaskCount(const Mask& mask);

// Back-projects every masked pixel: camera point d * ((u-cx)/fx, (v-cy)/fy, 1)
// transformed into the world frame, colored from the optical pixel. The mask
// is expected to be the intersection of a foreground mask and the depth
// validity mask, so every masked pixel carries a valid depth.
ColoredPointCloud ProjectPixels(const OpticalFrame& frame, const DepthImage& depth,
                                const Mask& mask);

}  // namespace oasis

#endif  // OASIS_FUSION_HPP_
