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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camknob {

/// The four tunable image parameters, in the fixed application order.
enum class Knob : std::uint8_t { Brightness = 0, Contrast = 1, ColorSaturation = 2, Sharpness = 3 };

inline constexpr std::array<Knob, 4> kAllKnobs = {Knob::Brightness, Knob::Contrast,
                                                  Knob::ColorSaturation, Knob::Sharpness};

std::string_view knob_name(Knob knob);
std::optional<Knob> parse_knob(std::string_view name);

/// H x W interleaved RGB raster, 8 bits per channel, row-major.
///
/// `tag` identifies the scene a frame was taken from. Transforms carry it
/// over so that simulated detectors can look up ground truth.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
  std::string tag;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, std::uint8_t fill = 0);

  bool empty() const { return width <= 0 || height <= 0 || data.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  std::uint8_t* px(int x, int y) { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = px(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  /// Throws std::invalid_argument unless the buffer is non-empty and sized w*h*3.
  void validate() const;

  bool same_pixels(const ImageBuffer& other) const {
    return width == other.width && height == other.height && data == other.data;
  }
};

/// Single-channel floating point matrix (luma, saturation, gradients).
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// A full virtual-knob configuration. 1.0 on every knob is the identity.
struct KnobConfig {
  double brightness = 1.0;
  double contrast = 1.0;
  double color_saturation = 1.0;
  double sharpness = 1.0;

  double& operator[](Knob k);
  double operator[](Knob k) const;

  static KnobConfig identity() { return {}; }
  std::array<double, 4> as_array() const { return {brightness, contrast, color_saturation, sharpness}; }
  static KnobConfig from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

  auto operator<=>(const KnobConfig&) const = default;
};

std::string to_string(const KnobConfig& config);

struct KnobRange {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo - 1e-9 && v <= hi + 1e-9; }
};

/// Camera-equivalent range of each virtual knob.
constexpr KnobRange knob_range(Knob knob) {
  switch (knob) {
    case Knob::Brightness:
      return {0.6, 1.6};
    case Knob::Contrast:
      return {0.6, 3.6};
    case Knob::ColorSaturation:
      return {0.1, 2.0};
    case Knob::Sharpness:
      return {0.5, 1.6};
  }
  return {0.0, 0.0};
}

bool within_knob_ranges(const KnobConfig& config);

/// Physical camera settings, 0..100 per parameter.
struct CameraParams {
  int brightness = 50;
  int contrast = 50;
  int color_saturation = 50;
  int sharpness = 50;

  int& operator[](Knob k);
  int operator[](Knob k) const;
  auto operator<=>(const CameraParams&) const = default;
};

}  // namespace camknob
