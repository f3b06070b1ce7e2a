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

#include "oasis/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace oasis {

namespace {

// Intensity sums stay exact in int64, so mean/sigma depend only on the
// mathematical window content, not on the accumulation order.
struct MomentSums {
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  std::int64_t count = 0;

  double Mean() const { return static_cast<double>(sum) / static_cast<double>(count); }
  double Sigma() const {
    const double mean = Mean();
    const double var =
        static_cast<double>(sum_sq) / static_cast<double>(count) - mean * mean;
    return std::sqrt(std::max(0.0, var));
  }
};

}  // namespace

void SonarFrame::Validate() const {
  intrinsics.Validate();
  if (!data.SameShape(intrinsics.range_bins, intrinsics.beams)) {
    throw std::invalid_argument("SonarFrame: image shape does not match intrinsics");
  }
}

BackgroundStats EstimateBackground(const SonarFrame& frame, int background_bins) {
  frame.Validate();
  if (background_bins < 1 || background_bins > frame.data.rows()) {
    throw std::invalid_argument("EstimateBackground: background_bins out of range");
  }
  MomentSums m;
  for (int r = 0; r < background_bins; ++r) {
    for (int c = 0; c < frame.data.cols(); ++c) {
      const std::int64_t v = frame.data.at(r, c);
      m.sum += v;
      m.sum_sq += v * v;
    }
  }
  m.count = static_cast<std::int64_t>(background_bins) * frame.data.cols();
  return BackgroundStats{m.Mean(), m.Sigma()};
}

BinaryPolarMap Binarize(const SonarFrame& frame, const BackgroundStats& background,
                        int half_window) {
  frame.Validate();
  if (half_window < 1) {
    throw std::invalid_argument("Binarize: half_window must be >= 1");
  }
  const int rows = frame.data.rows();
  const int cols = frame.data.cols();

  const double sigma_bg = background.sigma == 0.0 ? 1.0 : background.sigma;
  const double row_gate = background.mean + 2.0 * sigma_bg;

  // Per-row aggregates; a window over rows is then a sum of row aggregates.
  std::vector<std::int64_t> row_sum(rows, 0), row_sum_sq(rows, 0);
  std::vector<std::uint8_t> row_max(rows, 0);
  for (int r = 0; r < rows; ++r) {
    const std::uint8_t* px = frame.data.data() + static_cast<size_t>(r) * cols;
    std::int64_t s = 0, ss = 0;
    std::uint8_t mx = 0;
    for (int c = 0; c < cols; ++c) {
      const std::int64_t v = px[c];
      s += v;
      ss += v * v;
      mx = std::max(mx, px[c]);
    }
    row_sum[r] = s;
    row_sum_sq[r] = ss;
    row_max[r] = mx;
  }

  BinaryPolarMap out;
  out.intrinsics = frame.intrinsics;
  out.data = Image2D<std::uint8_t>(rows, cols, 0);

  for (int r = 0; r < rows; ++r) {
    // Rows are gated on their own max before any windowing.
    if (static_cast<double>(row_max[r]) < row_gate) continue;

    const int lo = std::max(0, r - half_window);
    const int hi = std::min(rows - 1, r + half_window);
    MomentSums m;
    for (int rr = lo; rr <= hi; ++rr) {
      m.sum += row_sum[rr];
      m.sum_sq += row_sum_sq[rr];
    }
    m.count = static_cast<std::int64_t>(hi - lo + 1) * cols;
    const double threshold = m.Mean() + m.Sigma();

    const std::uint8_t* px = frame.data.data() + static_cast<size_t>(r) * cols;
    std::uint8_t* bits = out.data.data() + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) {
      bits[c] = static_cast<double>(px[c]) > threshold ? 1 : 0;
    }
  }
  return out;
}

SonarFrame DecimateMax(const SonarFrame& frame, int factor) {
  frame.Validate();
  if (factor < 1) throw std::invalid_argument("DecimateMax: factor must be >= 1");
  if (factor == 1) return frame;

  const int rows = frame.data.rows();
  const int cols = frame.data.cols();
  const int out_rows = (rows + factor - 1) / factor;
  const int out_cols = (cols + factor - 1) / factor;

  SonarFrame out;
  out.intrinsics = frame.intrinsics;
  out.intrinsics.range_bins = out_rows;
  out.intrinsics.beams = out_cols;
  out.timestamp = frame.timestamp;
  out.pose = frame.pose;
  out.data = Image2D<std::uint8_t>(out_rows, out_cols, 0);

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::uint8_t& cell = out.data.at(r / factor, c / factor);
      cell = std::max(cell, frame.data.at(r, c));
    }
  }
  return out;
}

CartesianOccupancyImage ToCartesian(const BinaryPolarMap& map, double pixel_pitch) {
  map.intrinsics.Validate();
  if (!(pixel_pitch > 0.0)) {
    throw std::invalid_argument("ToCartesian: pixel_pitch must be positive");
  }
  const SonarIntrinsics& intr = map.intrinsics;
  const double half_span = intr.max_range * std::sin(intr.hfov / 2.0);

  CartesianOccupancyImage out;
  out.pixel_pitch = pixel_pitch;
  out.origin = Eigen::Vector2d(0.0, -half_span);
  const int height = static_cast<int>(std::ceil(intr.max_range / pixel_pitch));
  const int width = static_cast<int>(std::ceil(2.0 * half_span / pixel_pitch));
  out.data = Image2D<std::uint8_t>(height, width, 0);

  const double inv_dr = 1.0 / intr.RangeResolution();
  const double inv_daz = 1.0 / intr.BeamWidth();
  for (int i = 0; i < height; ++i) {
    const double x = out.origin.x() + (i + 0.5) * pixel_pitch;
    for (int j = 0; j < width; ++j) {
      const double y = out.origin.y() + (j + 0.5) * pixel_pitch;
      const double range = std::hypot(x, y);
      const double azimuth = std::atan2(y, x);
      if (range < intr.min_range || range > intr.max_range ||
          std::abs(azimuth) > intr.hfov / 2.0) {
        continue;
      }
      int bin = static_cast<int>((range - intr.min_range) * inv_dr);
      int beam = static_cast<int>((azimuth + intr.hfov / 2.0) * inv_daz);
      bin = std::clamp(bin, 0, intr.range_bins - 1);
      beam = std::clamp(beam, 0, intr.beams - 1);
      out.data.at(i, j) = map.data.at(bin, beam);
    }
  }
  return out;
}

}  // namespace oasis
