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

#ifndef OASIS_IMAGE_IO_HPP_
#define OASIS_IMAGE_IO_HPP_

#include <cstdint>
#include <string>

#include "oasis/image.hpp"

namespace oasis {

// Binary PGM (P5), 8-bit. Throws InputError on malformed input or I/O
// failure.
void WritePgm(const std::string& path, const Image2D<std::uint8_t>& image);
Image2D<std::uint8_t> ReadPgm(const std::string& path);

// Binary PPM (P6), 8-bit per channel.
void WritePpm(const std::string& path, const Image2D<Rgb>& image);
Image2D<Rgb> ReadPpm(const std::string& path);

}  // namespace oasis

#endif  // OASIS_IMAGE_IO_HPP_
