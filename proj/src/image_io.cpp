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

#include "oasis/image_io.hpp"

#include <cctype>
#include <fstream>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string NextToken(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      token.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int ParseHeaderInt(std::istream& in, const std::string& path, const char* what) {
  const std::string token = NextToken(in);
  try {
    const int value = std::stoi(token);
    if (value <= 0) throw std::out_of_range("non-positive");
    return value;
  } catch (const std::exception&) {
    throw InputError(path + ": bad " + what + " field '" + token + "'");
  }
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");
  return in;
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  return out;
}

void ReadHeader(std::istream& in, const std::string& path, const char* magic,
                int* cols, int* rows) {
  if (NextToken(in) != magic) {
    throw InputError(path + ": missing " + std::string(magic) + " magic");
  }
  *cols = ParseHeaderInt(in, path, "width");
  *rows = ParseHeaderInt(in, path, "height");
  const int maxval = ParseHeaderInt(in, path, "maxval");
  if (maxval != 255) throw InputError(path + ": only maxval 255 is supported");
  // The header ends with exactly one whitespace byte before the raster.
}

}  // namespace

void WritePgm(const std::string& path, const Image2D<std::uint8_t>& image) {
  std::ofstream out = OpenForWrite(path);
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()),
            static_cast<std::streamsize>(image.size()));
  if (!out) throw InputError(path + ": write failed");
}

Image2D<std::uint8_t> ReadPgm(const std::string& path) {
  std::ifstream in = OpenForRead(path);
  int rows = 0, cols = 0;
  ReadHeader(in, path, "P5", &cols, &rows);
  Image2D<std::uint8_t> image(rows, cols);
  in.read(reinterpret_cast<char*>(image.data()),
          static_cast<std::streamsize>(image.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.size())) {
    throw InputError(path + ": truncated raster");
  }
  return image;
}

void WritePpm(const std::string& path, const Image2D<Rgb>& image) {
  std::ofstream out = OpenForWrite(path);
  out << "P6\n" << image.cols() << " " << image.rows() << "\n255\n";
  static_assert(sizeof(Rgb) == 3, "Rgb must be packed");
  out.write(reinterpret_cast<const char*>(image.data()),
            static_cast<std::streamsize>(image.size() * 3));
  if (!out) throw InputError(path + ": write failed");
}

Image2D<Rgb> ReadPpm(const std::string& path) {
  std::ifstream in = OpenForRead(path);
  int rows = 0, cols = 0;
  ReadHeader(in, path, "P6", &cols, &rows);
  Image2D<Rgb> image(rows, cols);
  in.read(reinterpret_cast<char*>(image.data()),
          static_cast<std::streamsize>(image.size() * 3));
  if (in.gcount() != static_cast<std::streamsize>(image.size() * 3)) {
    throw InputError(path + ": truncated raster");
  }
  return image;
}

}  // namespace oasis
