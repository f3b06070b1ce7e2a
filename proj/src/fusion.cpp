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

#include "oasis/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oasis {

void OpticalFrame::Validate() const {
  intrinsics.Validate();
  if (!pixels.SameShape(intrinsics.height, intrinsics.width)) {
    throw std::invalid_argument("OpticalFrame: image shape does not match intrinsics");
  }
}

DepthRenderer::DepthRenderer(const TriangleMesh& mesh) {
  const size_t n = mesh.triangles.size();
  if (n == 0) return;

  std::vector<Eigen::Vector3f> centroids(n);
  std::vector<std::uint32_t> order(n);
  std::vector<PackedTriangle> packed(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& tri = mesh.triangles[i];
    const Eigen::Vector3d& a = mesh.vertices[tri[0]];
    const Eigen::Vector3d& b = mesh.vertices[tri[1]];
    const Eigen::Vector3d& c = mesh.vertices[tri[2]];
    packed[i] = {a, b - a, c - a};
    centroids[i] = ((a + b + c) / 3.0).cast<float>();
    order[i] = static_cast<std::uint32_t>(i);
  }

  nodes_.reserve(2 * n);
  triangles_.reserve(n);
  // Triangles are appended in leaf order during the build; packed stays
  // indexed by original id until then.
  std::vector<PackedTriangle> original = std::move(packed);
  triangles_.clear();

  struct Range {
    int begin, end;
    std::uint32_t node;
  };
  nodes_.push_back({});
  std::vector<Range> stack{{0, static_cast<int>(n), 0}};
  while (!stack.empty()) {
    const Range range = stack.back();
    stack.pop_back();

    Eigen::Vector3f lo = Eigen::Vector3f::Constant(std::numeric_limits<float>::max());
    Eigen::Vector3f hi = Eigen::Vector3f::Constant(std::numeric_limits<float>::lowest());
    for (int i = range.begin; i < range.end; ++i) {
      const PackedTriangle& t = original[order[i]];
      const Eigen::Vector3f a = t.a.cast<float>();
      const Eigen::Vector3f b = (t.a + t.edge_ab).cast<float>();
      const Eigen::Vector3f c = (t.a + t.edge_ac).cast<float>();
      lo = lo.cwiseMin(a).cwiseMin(b).cwiseMin(c);
      hi = hi.cwiseMax(a).cwiseMax(b).cwiseMax(c);
    }
    Node& node = nodes_[range.node];
    node.box_min = lo;
    node.box_max = hi;

    const int count = range.end - range.begin;
    if (count <= 4) {
      node.left = static_cast<std::uint32_t>(triangles_.size());
      node.count = static_cast<std::uint32_t>(count);
      for (int i = range.begin; i < range.end; ++i) {
        triangles_.push_back(original[order[i]]);
      }
      continue;
    }

    int axis;
    (hi - lo).maxCoeff(&axis);
    const int mid = range.begin + count / 2;
    std::nth_element(order.begin() + range.begin, order.begin() + mid,
                     order.begin() + range.end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return centroids[a][axis] < centroids[b][axis];
                     });

    node.count = 0;
    node.left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    stack.push_back({range.begin, mid, node.left});
    stack.push_back({mid, range.end, node.left + 1});
  }
}

namespace {

inline bool SlabHit(const Eigen::Vector3f& box_min, const Eigen::Vector3f& box_max,
                    const Eigen::Vector3f& origin, const Eigen::Vector3f& inv_dir,
                    float t_best) {
  float t0 = 0.0f, t1 = t_best;
  for (int a = 0; a < 3; ++a) {
    const float near = (box_min[a] - origin[a]) * inv_dir[a];
    const float far = (box_max[a] - origin[a]) * inv_dir[a];
    t0 = std::max(t0, std::min(near, far));
    t1 = std::min(t1, std::max(near, far));
  }
  return t0 <= t1;
}

}  // namespace

double DepthRenderer::CastRay(const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& direction) const {
  if (nodes_.empty()) return -1.0;

  const Eigen::Vector3f origin_f = origin.cast<float>();
  Eigen::Vector3f inv_dir;
  for (int a = 0; a < 3; ++a) {
    // Signed infinity keeps the slab test valid for axis-parallel rays.
    inv_dir[a] = 1.0f / static_cast<float>(direction[a]);
  }

  double t_best = std::numeric_limits<double>::max();
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!SlabHit(node.box_min, node.box_max, origin_f, inv_dir,
                 static_cast<float>(t_best) * 1.0001f)) {
      continue;
    }
    if (node.count == 0) {
      stack[top++] = node.left;
      stack[top++] = node.left + 1;
      continue;
    }
    for (std::uint32_t i = node.left; i < node.left + node.count; ++i) {
      const PackedTriangle& tri = triangles_[i];
      // Moller-Trumbore.
      const Eigen::Vector3d pvec = direction.cross(tri.edge_ac);
      const double det = tri.edge_ab.dot(pvec);
      if (std::abs(det) < 1e-14) continue;
      const double inv_det = 1.0 / det;
      const Eigen::Vector3d tvec = origin - tri.a;
      const double u = tvec.dot(pvec) * inv_det;
      if (u < 0.0 || u > 1.0) continue;
      const Eigen::Vector3d qvec = tvec.cross(tri.edge_ab);
      const double v = direction.dot(qvec) * inv_det;
      if (v < 0.0 || u + v > 1.0) continue;
      const double t = tri.edge_ac.dot(qvec) * inv_det;
      if (t > 1e-9 && t < t_best) t_best = t;
    }
  }
  return t_best == std::numeric_limits<double>::max() ? -1.0 : t_best;
}

DepthImage DepthRenderer::Render(const CameraIntrinsics& intrinsics,
                                 const Pose& pose) const {
  intrinsics.Validate();
  DepthImage out;
  out.intrinsics = intrinsics;
  out.depths = Image2D<float>(intrinsics.height, intrinsics.width, DepthImage::kNoHit);
  if (nodes_.empty()) return out;

  const Eigen::Matrix3d& rot = pose.rotation();
  const Eigen::Vector3d& origin = pose.translation();
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      // Unnormalized camera ray with dz = 1, so the ray parameter is the
      // camera-frame z depth directly.
      const Eigen::Vector3d dir_cam((u - intrinsics.cx) / intrinsics.fx,
                                    (v - intrinsics.cy) / intrinsics.fy, 1.0);
      const double t = CastRay(origin, rot * dir_cam);
      if (t > 0.0) out.depths.at(v, u) = static_cast<float>(t);
    }
  }
  return out;
}

namespace {

Rgb BorderMedianColor(const Image2D<Rgb>& pixels) {
  std::vector<std::uint8_t> r, g, b;
  const int rows = pixels.rows(), cols = pixels.cols();
  const auto add = [&](int i, int j) {
    const Rgb& p = pixels.at(i, j);
    r.push_back(p.r);
    g.push_back(p.g);
    b.push_back(p.b);
  };
  for (int j = 0; j < cols; ++j) {
    add(0, j);
    if (rows > 1) add(rows - 1, j);
  }
  for (int i = 1; i + 1 < rows; ++i) {
    add(i, 0);
    if (cols > 1) add(i, cols - 1);
  }
  const auto median = [](std::vector<std::uint8_t>& v) -> std::uint8_t {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  return Rgb{median(r), median(g), median(b)};
}

inline double ColorDistance(const Rgb& a, const Rgb& b) {
  const double dr = static_cast<double>(a.r) - b.r;
  const double dg = static_cast<double>(a.g) - b.g;
  const double db = static_cast<double>(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace

Mask ForegroundMask(const OpticalFrame& frame, const MaskParams& params) {
  frame.Validate();
  if (params.mode == MaskParams::Mode::kExternal) {
    throw std::invalid_argument(
        "ForegroundMask: external masks are loaded by the pipeline, not computed here");
  }
  const Rgb background =
      params.background_color ? *params.background_color : BorderMedianColor(frame.pixels);

  Mask mask(frame.pixels.rows(), frame.pixels.cols(), 0);
  for (int i = 0; i < mask.rows(); ++i) {
    for (int j = 0; j < mask.cols(); ++j) {
      mask.at(i, j) =
          ColorDistance(frame.pixels.at(i, j), background) > params.threshold ? 1 : 0;
    }
  }
  return mask;
}

Mask DepthValidityMask(const DepthImage& depth) {
  Mask mask(depth.depths.rows(), depth.depths.cols(), 0);
  for (int i = 0; i < mask.rows(); ++i) {
    for (int j = 0; j < mask.cols(); ++j) {
      const float d = depth.depths.at(i, j);
      mask.at(i, j) = std::isfinite(d) && d > 0.0f ? 1 : 0;
    }
  }
  return mask;
}

Mask MaskIntersect(const Mask& a, const Mask& b) {
  if (!a.SameShape(b.rows(), b.cols())) {
    throw std::invalid_argument("MaskIntersect: shape mismatch");
  }
  Mask out(a.rows(), a.cols(), 0);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.at(i, j) = (a.at(i, j) && b.at(i, j)) ? 1 : 0;
    }
  }
  return out;
}

size_t MaskCount(const Mask& mask) {
  size_t n = 0;
  for (int i = 0; i < mask.rows(); ++i) {
    for (int j = 0; j < mask.cols(); ++j) n += mask.at(i, j) ? 1 : 0;
  }
  return n;
}

ColoredPointCloud ProjectPixels(const OpticalFrame& frame, const DepthImage& depth,
                                const Mask& mask) {
  frame.Validate();
  const CameraIntrinsics& intr = frame.intrinsics;
  if (!depth.depths.SameShape(intr.height, intr.width) ||
      !mask.SameShape(intr.height, intr.width)) {
    throw std::invalid_argument("ProjectPixels: shape mismatch");
  }
  ColoredPointCloud cloud;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      if (!mask.at(v, u)) continue;
      const double d = depth.depths.at(v, u);
      const Eigen::Vector3d point_cam(d * (u - intr.cx) / intr.fx,
                                      d * (v - intr.cy) / intr.fy, d);
      cloud.points.push_back(frame.pose * point_cam);
      cloud.colors.push_back(frame.pixels.at(v, u));
    }
  }
  return cloud;
}

}  // namespace oasis
