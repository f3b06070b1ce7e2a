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

#ifndef OASIS_PREPROCESS_HPP_
#define OASIS_PREPROCESS_HPP_

#include <cstdint>

#include <Eigen/Core>

#include "oasis/geometry.hpp"
#include "oasis/image.hpp"

namespace oasis {

// Raw 8-bit polar intensity frame. Rows are range bins ordered near to far,
// columns are beams ordered left to right (azimuth -hfov/2 to +hfov/2).
struct SonarFrame {
  Image2D<std::uint8_t> data;
  SonarIntrinsics intrinsics;
  double timestamp = 0.0;
  Pose pose;  // world <- sonar

  void Validate() const;  // dimensions must match intrinsics
};

// Background noise statistics. Sigma is the population standard deviation
// throughout (consistent with the window statistics below).
struct BackgroundStats {
  double mean = 0.0;
  double sigma = 0.0;
};

// Per-pixel {0,1} occupancy, same shape as the source frame.
struct BinaryPolarMap {
  Image2D<std::uint8_t> data;
  SonarIntrinsics intrinsics;
};

// Top-down {0,1} raster of a binary polar map. Pixel (row, col) covers the
// sensor-frame square with min corner origin + (row, col) * pixel_pitch on
// the (x, y) plane.
struct CartesianOccupancyImage {
  Image2D<std::uint8_t> data;
  double pixel_pitch = 0.0;             // meters per pixel
  Eigen::Vector2d origin{0.0, 0.0};     // sensor-frame (x, y) of pixel (0, 0)
};

// Mean/population-sigma over the first `background_bins` range-bin rows of
// the frame (all beams), which are assumed free of returns.
BackgroundStats EstimateBackground(const SonarFrame& frame, int background_bins = 10);

// Converts intensities to a binary occupancy map with ring suppression.
//
// A range-bin row is considered empty (all zeros) unless its max intensity
// reaches mean_bg + 2 * sigma_bg. For the remaining rows, mean and sigma are
// taken over the band of rows [r - half_window, r + half_window] (clamped at
// the array edges) across all beams, and a pixel is occupied iff its
// intensity exceeds mean_w + sigma_w.
//
// A degenerate sigma_bg of exactly 0 (noiseless synthetic data) is replaced
// by 1 intensity unit so the gate keeps its meaning.
BinaryPolarMap Binarize(const SonarFrame& frame, const BackgroundStats& background,
                        int half_window = 5);

// Max-pools factor x factor blocks. Output dimensions are the ceiling of the
// input dimensions over factor; partial edge blocks act as if zero-padded.
// The intrinsics' bin/beam counts shrink accordingly.
SonarFrame DecimateMax(const SonarFrame& frame, int factor);

// Resamples a binary polar map onto a top-down cartesian raster by inverse
// mapping: each output pixel center is converted to (range, azimuth) and
// copies the nearest polar pixel, or 0 outside the frustum. Retained for
// visualization and export; carving reads the polar map directly.
CartesianOccupancyImage ToCartesian(const BinaryPolarMap& map, double pixel_pitch);

}  // namespace oasis

#endif  // OASIS_PREPROCESS_HPP_
