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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <Eigen/Geometry>

#include "oasis/fusion.hpp"

namespace oasis {
namespace {

// Axis-aligned quad in the z = depth plane (world == camera frame when the
// pose is identity), split into two triangles, facing the camera.
TriangleMesh QuadAt(double depth, double half_extent) {
  TriangleMesh mesh;
  mesh.vertices = {
      {-half_extent, -half_extent, depth},
      {half_extent, -half_extent, depth},
      {half_extent, half_extent, depth},
      {-half_extent, half_extent, depth},
  };
  // Camera looks along +z, so a face toward the camera winds clockwise in
  // (x, y) as seen from +z.
  mesh.triangles = {{0, 2, 1}, {0, 3, 2}};
  return mesh;
}

CameraIntrinsics SmallCamera() {
  CameraIntrinsics c;
  c.fx = 80.0;
  c.fy = 80.0;
  c.cx = 32.0;
  c.cy = 24.0;
  c.width = 64;
  c.height = 48;
  return c;
}

TEST_CASE("depth render of a frontal plane is the plane depth everywhere") {
  const double depth = 2.0;
  const TriangleMesh quad = QuadAt(depth, 5.0);  // wide enough to fill the view
  const CameraIntrinsics cam = SmallCamera();
  const DepthImage image = RenderDepth(quad, cam, Pose());

  REQUIRE(image.depths.rows() == cam.height);
  REQUIRE(image.depths.cols() == cam.width);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      // A plane orthogonal to the axis has constant camera-frame z.
      CHECK(image.depths.at(v, u) == doctest::Approx(depth).epsilon(1e-6));
    }
  }
}

TEST_CASE("depth render respects the camera pose") {
  const TriangleMesh quad = QuadAt(2.0, 5.0);
  const CameraIntrinsics cam = SmallCamera();
  // Slide the camera back 1 m along its own axis: depths grow by 1.
  const Pose pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0, 0, -1.0));
  const DepthImage image = RenderDepth(quad, cam, pose);
  CHECK(image.depths.at(24, 32) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("rays that miss record no hit") {
  const TriangleMesh quad = QuadAt(2.0, 0.05);  // small target
  const CameraIntrinsics cam = SmallCamera();
  const DepthImage image = RenderDepth(quad, cam, Pose());

  CHECK(image.depths.at(24, 32) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(image.depths.at(0, 0) == DepthImage::kNoHit);

  const DepthRenderer renderer(quad);
  CHECK(renderer.CastRay({0, 0, 0}, {0, 0, -1}) < 0.0);   // away from the quad
  CHECK(renderer.CastRay({0, 0, 0}, {0, 0, 1}) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(renderer.CastRay({10, 10, 0}, {0, 0, 1}) < 0.0);  // parallel but offset
}

TEST_CASE("empty mesh renders an empty depth image") {
  const TriangleMesh empty;
  const DepthRenderer renderer(empty);
  CHECK(renderer.empty());
  const DepthImage image = renderer.Render(SmallCamera(), Pose());
  for (int v = 0; v < image.depths.rows(); ++v) {
    for (int u = 0; u < image.depths.cols(); ++u) {
      CHECK(image.depths.at(v, u) == DepthImage::kNoHit);
    }
  }
}

TEST_CASE("depth validity mask marks exactly the hits") {
  const TriangleMesh quad = QuadAt(2.0, 0.2);
  const CameraIntrinsics cam = SmallCamera();
  const DepthImage image = RenderDepth(quad, cam, Pose());
  const Mask mask = DepthValidityMask(image);

  size_t hits = 0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const bool hit = image.depths.at(v, u) != DepthImage::kNoHit;
      CHECK((mask.at(v, u) != 0) == hit);
      hits += hit ? 1 : 0;
    }
  }
  CHECK(MaskCount(mask) == hits);
  CHECK(hits > 0);
  CHECK(hits < static_cast<size_t>(cam.width) * cam.height);
}

TEST_CASE("mask intersect and count") {
  Mask a(2, 2, 0), b(2, 2, 0);
  a.at(0, 0) = 1;
  a.at(0, 1) = 1;
  b.at(0, 1) = 5;  // any nonzero counts
  b.at(1, 0) = 1;
  const Mask both = MaskIntersect(a, b);
  CHECK(both.at(0, 0) == 0);
  CHECK(both.at(0, 1) != 0);
  CHECK(both.at(1, 0) == 0);
  CHECK(both.at(1, 1) == 0);
  CHECK(MaskCount(both) == 1);
  CHECK(MaskCount(a) == 2);

  Mask wrong(3, 2, 0);
  CHECK_THROWS_AS(MaskIntersect(a, wrong), std::invalid_argument);
}

OpticalFrame FrameWithSquare(const Rgb& background, const Rgb& object) {
  OpticalFrame frame;
  frame.intrinsics = SmallCamera();
  frame.pixels = Image2D<Rgb>(48, 64, background);
  for (int v = 16; v < 32; ++v) {
    for (int u = 24; u < 40; ++u) frame.pixels.at(v, u) = object;
  }
  return frame;
}

TEST_CASE("foreground mask recovers a bright square exactly") {
  const OpticalFrame frame = FrameWithSquare({10, 10, 10}, {200, 50, 50});

  MaskParams params;
  params.background_color = Rgb{10, 10, 10};
  params.threshold = 60.0;
  const Mask mask = ForegroundMask(frame, params);

  for (int v = 0; v < 48; ++v) {
    for (int u = 0; u < 64; ++u) {
      const bool inside = v >= 16 && v < 32 && u >= 24 && u < 40;
      CHECK((mask.at(v, u) != 0) == inside);
    }
  }
}

TEST_CASE("foreground mask learns the background from the border") {
  const OpticalFrame frame = FrameWithSquare({10, 10, 10}, {200, 50, 50});
  MaskParams params;  // background_color unset: median of the border
  const Mask mask = ForegroundMask(frame, params);
  CHECK(MaskCount(mask) == 16 * 16);
  CHECK(mask.at(20, 30) != 0);
  CHECK(mask.at(0, 0) == 0);
}

TEST_CASE("uniform image yields an empty mask") {
  OpticalFrame frame;
  frame.intrinsics = SmallCamera();
  frame.pixels = Image2D<Rgb>(48, 64, Rgb{90, 90, 90});
  const Mask mask = ForegroundMask(frame, MaskParams{});
  CHECK(MaskCount(mask) == 0);
}

TEST_CASE("projected pixels land on the surface and reproject to source") {
  const double depth = 1.5;
  const TriangleMesh quad = QuadAt(depth, 5.0);
  const CameraIntrinsics cam = SmallCamera();

  OpticalFrame frame;
  frame.intrinsics = cam;
  frame.pixels = Image2D<Rgb>(cam.height, cam.width, Rgb{0, 0, 0});
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      frame.pixels.at(v, u) = Rgb{static_cast<std::uint8_t>(u),
                                  static_cast<std::uint8_t>(v), 7};
    }
  }
  // A pose with rotation and translation so the world and camera frames
  // genuinely differ.
  const Pose pose(
      Eigen::AngleAxisd(30.0 * kDegrees, Eigen::Vector3d::UnitY()).toRotationMatrix(),
      Eigen::Vector3d(0.3, -0.2, 0.1));
  frame.pose = pose;
  // The quad is defined in camera coordinates; move it to world space.
  TriangleMesh world_quad = quad;
  for (Eigen::Vector3d& v : world_quad.vertices) v = pose * v;

  const DepthImage image = RenderDepth(world_quad, cam, pose);
  Mask mask = DepthValidityMask(image);
  // Drop a corner so the mask is a strict subset.
  mask.at(0, 0) = 0;

  const ColoredPointCloud cloud = ProjectPixels(frame, image, mask);
  REQUIRE(cloud.points.size() == MaskCount(mask));
  REQUIRE(cloud.colors.size() == cloud.points.size());

  const Pose camera_from_world = pose.Inverse();
  size_t i = 0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      if (!mask.at(v, u)) continue;
      const Eigen::Vector3d p_cam = camera_from_world * cloud.points[i];
      // On the quad plane (z = depth in camera frame).
      CHECK(p_cam.z() == doctest::Approx(depth).epsilon(1e-5));
      // Reprojection returns to the source pixel coordinate (rays sample at
      // integer pixel positions).
      const double u_proj = p_cam.x() / p_cam.z() * cam.fx + cam.cx;
      const double v_proj = p_cam.y() / p_cam.z() * cam.fy + cam.cy;
      CHECK(std::abs(u_proj - u) < 0.01);
      CHECK(std::abs(v_proj - v) < 0.01);
      // Colors copied from the frame.
      CHECK(cloud.colors[i] == frame.pixels.at(v, u));
      ++i;
    }
  }
}

TEST_CASE("optical frame validation") {
  OpticalFrame frame;
  frame.intrinsics = SmallCamera();
  frame.pixels = Image2D<Rgb>(48, 64);
  CHECK_NOTHROW(frame.Validate());
  frame.pixels = Image2D<Rgb>(10, 10);
  CHECK_THROWS_AS(frame.Validate(), std::invalid_argument);
}

TEST_CASE("project pixels rejects mismatched shapes") {
  OpticalFrame frame;
  frame.intrinsics = SmallCamera();
  frame.pixels = Image2D<Rgb>(48, 64);
  DepthImage depth;
  depth.intrinsics = frame.intrinsics;
  depth.depths = Image2D<float>(48, 64, 1.0f);
  Mask mask(10, 10, 1);
  CHECK_THROWS_AS(ProjectPixels(frame, depth, mask), std::invalid_argument);
}

}  // namespace
}  // namespace oasis
