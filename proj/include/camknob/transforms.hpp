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

#include "camknob/image.hpp"

namespace camknob {

/// Row-major 3x3 convolution kernel.
using Kernel3x3 = std::array<double, 9>;

/// Smoothing kernel used as the sharpness degenerate image: ones with a
/// centre weight of 5, normalised by 13.
inline constexpr Kernel3x3 kSmoothKernel = {1.0 / 13, 1.0 / 13, 1.0 / 13, 1.0 / 13, 5.0 / 13,
                                            1.0 / 13, 1.0 / 13, 1.0 / 13, 1.0 / 13};

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma_of(const std::uint8_t* rgb) {
  return kLumaR * rgb[0] + kLumaG * rgb[1] + kLumaB * rgb[2];
}

/// Blends the image with a knob-specific degenerate image:
///
///   out = clamp(round((1 - factor) * D + factor * img))
///
/// where D is black (brightness), the uniform mean luma (contrast), the
/// per-pixel grayscale (color saturation) or the 3x3-smoothed image
/// (sharpness). factor == 1 returns an exact copy.
///
/// Throws std::invalid_argument for a negative/non-finite factor or an empty image.
ImageBuffer apply_knob(const ImageBuffer& img, Knob knob, double factor);

/// Applies brightness, contrast, color saturation, then sharpness.
ImageBuffer apply_config(const ImageBuffer& img, const KnobConfig& config);

Plane to_luma(const ImageBuffer& img);

/// HSV saturation, (max - min) / max per pixel, 0 for black.
Plane saturation_channel(const ImageBuffer& img);

/// Per-channel convolution with edge replication; results rounded and clamped.
ImageBuffer convolve3x3(const ImageBuffer& img, const Kernel3x3& kernel);

/// Same as convolve3x3 but keeps full precision (interleaved RGB doubles).
std::vector<double> convolve3x3_exact(const ImageBuffer& img, const Kernel3x3& kernel);

inline std::uint8_t to_u8(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace camknob
