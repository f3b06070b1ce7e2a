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

#include "oasis/frame_log.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "oasis/errors.hpp"
#include "oasis/image_io.hpp"

namespace oasis {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string FrameName(const char* prefix, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s/%06d.%s", prefix, index, ext);
  return buf;
}

json PoseToJson(const Pose& pose) {
  const Eigen::Quaterniond q = pose.quaternion();
  const Eigen::Vector3d& t = pose.translation();
  json row;
  row["t"] = {t.x(), t.y(), t.z()};
  row["q"] = {q.w(), q.x(), q.y(), q.z()};
  return row;
}

Pose PoseFromJson(const json& row, const std::string& context) {
  if (!row.contains("t") || !row.contains("q")) {
    throw InputError(context + ": record lacks pose fields 't'/'q'");
  }
  const json& t = row["t"];
  const json& q = row["q"];
  if (!t.is_array() || t.size() != 3 || !q.is_array() || q.size() != 4) {
    throw InputError(context + ": pose fields must be t[3] and q[4]");
  }
  for (const json& v : t) {
    if (!v.is_number()) throw InputError(context + ": non-numeric translation");
  }
  for (const json& v : q) {
    if (!v.is_number()) throw InputError(context + ": non-numeric quaternion");
  }
  const double w = q[0].get<double>(), x = q[1].get<double>(),
               y = q[2].get<double>(), z = q[3].get<double>();
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (std::abs(norm - 1.0) > 1e-6) {
    throw InputError(context + ": quaternion is not unit length");
  }
  return Pose::FromQuaternionWxyz(
      w / norm, x / norm, y / norm, z / norm,
      Eigen::Vector3d(t[0].get<double>(), t[1].get<double>(), t[2].get<double>()));
}

}  // namespace

FrameLogWriter::FrameLogWriter(const std::string& directory)
    : directory_(directory), last_timestamp_(-std::numeric_limits<double>::infinity()) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw InputError(directory_ + ": cannot create log directory");
  index_.open(fs::path(directory_) / "index.jsonl", std::ios::trunc);
  if (!index_) throw InputError(directory_ + ": cannot open index.jsonl");
}

FrameLogWriter::~FrameLogWriter() {
  if (index_.is_open()) index_.close();
}

void FrameLogWriter::AppendIndexRow(FrameRecord::Kind kind, double timestamp,
                                    const Pose& pose, const std::string& file,
                                    const std::string& mask_file) {
  if (any_record_ && timestamp < last_timestamp_) {
    throw InputError(directory_ + ": timestamps must be non-decreasing");
  }
  any_record_ = true;
  last_timestamp_ = timestamp;

  json row = PoseToJson(pose);
  row["kind"] = kind == FrameRecord::Kind::kSonar ? "sonar" : "optical";
  row["timestamp"] = timestamp;
  row["file"] = file;
  if (!mask_file.empty()) row["mask"] = mask_file;
  index_ << row.dump() << "\n";
  if (!index_) throw InputError(directory_ + ": failed to append to index.jsonl");
}

void FrameLogWriter::AddSonar(const SonarFrame& frame) {
  frame.Validate();
  if (sonar_count_ == 0) {
    std::error_code ec;
    fs::create_directories(fs::path(directory_) / "sonar", ec);
    if (ec) throw InputError(directory_ + ": cannot create sonar subdirectory");
  }
  const std::string name = FrameName("sonar", sonar_count_, "pgm");
  WritePgm((fs::path(directory_) / name).string(), frame.data);
  AppendIndexRow(FrameRecord::Kind::kSonar, frame.timestamp, frame.pose, name, "");
  ++sonar_count_;
}

void FrameLogWriter::AddOptical(const OpticalFrame& frame, const Mask* mask) {
  frame.Validate();
  if (optical_count_ == 0) {
    std::error_code ec;
    fs::create_directories(fs::path(directory_) / "optical", ec);
    if (ec) throw InputError(directory_ + ": cannot create optical subdirectory");
  }
  const std::string name = FrameName("optical", optical_count_, "ppm");
  WritePpm((fs::path(directory_) / name).string(), frame.pixels);

  std::string mask_name;
  if (mask != nullptr) {
    if (!mask->SameShape(frame.pixels.rows(), frame.pixels.cols())) {
      throw InputError(directory_ + ": mask shape does not match optical frame");
    }
    mask_name = FrameName("optical", optical_count_, "mask.pgm");
    Image2D<std::uint8_t> visible(mask->rows(), mask->cols());
    for (int i = 0; i < mask->rows(); ++i) {
      for (int j = 0; j < mask->cols(); ++j) {
        visible.at(i, j) = mask->at(i, j) ? 255 : 0;
      }
    }
    WritePgm((fs::path(directory_) / mask_name).string(), visible);
  }
  AppendIndexRow(FrameRecord::Kind::kOptical, frame.timestamp, frame.pose, name,
                 mask_name);
  ++optical_count_;
}

void FrameLogWriter::Close() {
  if (!index_.is_open()) return;
  index_.flush();
  if (!index_) throw InputError(directory_ + ": failed to flush index.jsonl");
  index_.close();
}

FrameLog ReadFrameLog(const std::string& directory) {
  const fs::path index_path = fs::path(directory) / "index.jsonl";
  std::ifstream in(index_path);
  if (!in) throw InputError(index_path.string() + ": cannot open");

  FrameLog log;
  log.directory = directory;

  std::string line;
  int line_no = 0;
  double last_timestamp = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = index_path.string() + ":" + std::to_string(line_no);

    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(context + ": " + e.what());
    }
    if (!row.is_object()) throw InputError(context + ": record is not an object");

    FrameRecord record;
    const std::string kind = row.value("kind", "");
    if (kind == "sonar") {
      record.kind = FrameRecord::Kind::kSonar;
    } else if (kind == "optical") {
      record.kind = FrameRecord::Kind::kOptical;
    } else {
      throw InputError(context + ": unknown kind '" + kind + "'");
    }

    if (!row.contains("timestamp") || !row["timestamp"].is_number()) {
      throw InputError(context + ": missing numeric timestamp");
    }
    record.timestamp = row["timestamp"];
    if (record.timestamp < last_timestamp) {
      throw InputError(context + ": timestamps must be non-decreasing");
    }
    last_timestamp = record.timestamp;

    record.pose = PoseFromJson(row, context);

    record.file = row.value("file", "");
    if (record.file.empty()) throw InputError(context + ": missing file");
    if (!fs::exists(fs::path(directory) / record.file)) {
      throw InputError(context + ": referenced file '" + record.file + "' not found");
    }
    if (row.contains("mask")) {
      record.mask_file = row["mask"];
      if (!fs::exists(fs::path(directory) / record.mask_file)) {
        throw InputError(context + ": referenced mask '" + record.mask_file +
                         "' not found");
      }
    }
    log.records.push_back(std::move(record));
  }
  return log;
}

Image2D<std::uint8_t> LoadSonarImage(const FrameLog& log, const FrameRecord& record) {
  return ReadPgm((fs::path(log.directory) / record.file).string());
}

Image2D<Rgb> LoadOpticalImage(const FrameLog& log, const FrameRecord& record) {
  return ReadPpm((fs::path(log.directory) / record.file).string());
}

Mask LoadExternalMask(const FrameLog& log, const FrameRecord& record) {
  if (record.mask_file.empty()) {
    throw InputError(log.directory + ": record has no mask file");
  }
  Image2D<std::uint8_t> raw =
      ReadPgm((fs::path(log.directory) / record.mask_file).string());
  for (int i = 0; i < raw.rows(); ++i) {
    for (int j = 0; j < raw.cols(); ++j) {
      raw.at(i, j) = raw.at(i, j) ? 1 : 0;
    }
  }
  return raw;
}

}  // namespace oasis
