// Copyright 2026 The camknob Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "camknob/image.hpp"

namespace camknob {

/// Raised for unreadable, truncated or malformed image data.
class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ImageBuffer read_ppm(const std::filesystem::path& path);
void write_ppm(const ImageBuffer& img, const std::filesystem::path& path);

ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const ImageBuffer& img, const std::filesystem::path& path);

/// Dispatches on the extension (.png, .ppm). The tag is set to the file stem.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace camknob
