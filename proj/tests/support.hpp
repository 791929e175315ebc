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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "camknob/image.hpp"
#include "camknob/transforms.hpp"

namespace camknob::testing {

inline ImageBuffer random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  ImageBuffer img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(px(rng));
  return img;
}

/// Smooth colored gradient with some texture and a bright block.
inline ImageBuffer textured_image(int w, int h, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> n(-6.0, 6.0);
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = 18.0 * std::sin(x * 0.6) * std::cos(y * 0.45);
      double r = 60 + 90.0 * x / w + t + n(rng);
      double g = 70 + 70.0 * y / h + t + n(rng);
      double b = 150 - 60.0 * x / w + t + n(rng);
      if (x > w / 4 && x < w / 2 && y > h / 3 && y < 2 * h / 3) {
        r = 210;
        g = 60;
        b = 50;
      }
      img.set(x, y, to_u8(r), to_u8(g), to_u8(b));
    }
  }
  return img;
}

inline ImageBuffer uniform_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, r, g, b);
  return img;
}

inline std::filesystem::path data_dir() { return std::filesystem::path(CAMKNOB_TEST_DATA); }

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("camknob_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace camknob::testing
