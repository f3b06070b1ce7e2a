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

#ifndef OASIS_FRAME_LOG_HPP_
#define OASIS_FRAME_LOG_HPP_

#include <fstream>
#include <string>
#include <vector>

#include "oasis/fusion.hpp"
#include "oasis/image.hpp"
#include "oasis/preprocess.hpp"

namespace oasis {

// A recording session lives in one directory: an `index.jsonl` file with one
// JSON object per frame (kind, timestamp, pose, relative file path, optional
// mask path) plus the image files it points to. Sonar frames are stored as
// 8-bit PGM, optical frames as PPM, masks as PGM (nonzero = foreground).
struct FrameRecord {
  enum class Kind { kSonar, kOptical };

  Kind kind = Kind::kSonar;
  double timestamp = 0.0;
  // World <- producing sensor. Optical records carry the camera pose, sonar
  // records the sonar pose; rig extrinsics are resolved by the producer.
  Pose pose;
  std::string file;       // relative to the log directory
  std::string mask_file;  // optional, empty when absent
};

struct FrameLog {
  std::string directory;
  std::vector<FrameRecord> records;
};

class FrameLogWriter {
 public:
  // Creates the directory (and parents) if needed and opens a fresh index.
  explicit FrameLogWriter(const std::string& directory);
  ~FrameLogWriter();

  FrameLogWriter(const FrameLogWriter&) = delete;
  FrameLogWriter& operator=(const FrameLogWriter&) = delete;

  void AddSonar(const SonarFrame& frame);
  void AddOptical(const OpticalFrame& frame, const Mask* mask = nullptr);

  // Flushes the index; throws InputError if anything failed to reach disk.
  void Close();

  const std::string& directory() const { return directory_; }

 private:
  void AppendIndexRow(FrameRecord::Kind kind, double timestamp, const Pose& pose,
                      const std::string& file, const std::string& mask_file);

  std::string directory_;
  std::ofstream index_;
  int sonar_count_ = 0;
  int optical_count_ = 0;
  double last_timestamp_ = 0.0;
  bool any_record_ = false;
};

// Parses and validates index.jsonl: known kinds, non-decreasing timestamps,
// unit quaternions, referenced files present on disk. Throws InputError with
// the offending line number.
FrameLog ReadFrameLog(const std::string& directory);

Image2D<std::uint8_t> LoadSonarImage(const FrameLog& log, const FrameRecord& record);
Image2D<Rgb> LoadOpticalImage(const FrameLog& log, const FrameRecord& record);
// Loads an external mask and normalizes nonzero pixels to 1.
Mask LoadExternalMask(const FrameLog& log, const FrameRecord& record);

}  // namespace oasis

#endif  // OASIS_FRAME_LOG_HPP_
