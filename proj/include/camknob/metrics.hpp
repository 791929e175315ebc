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
#include <cstddef>
#include <vector>

#include "camknob/image.hpp"

namespace camknob {

/// Measured appearance of an image or tile.
///
/// brightness        mean luma
/// contrast          standard deviation of luma (RMS contrast)
/// color_saturation  mean HSV saturation, in [0, 1]
/// sharpness         mean 3x3 Sobel gradient magnitude of luma
struct FeatureTuple {
  double brightness = 0.0;
  double contrast = 0.0;
  double color_saturation = 0.0;
  double sharpness = 0.0;

  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;
  std::array<double, 4> as_array() const { return {brightness, contrast, color_saturation, sharpness}; }
  static FeatureTuple from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

  bool operator==(const FeatureTuple&) const = default;
};

inline constexpr std::array<const char*, 4> kFeatureNames = {"brightness", "contrast", "color_saturation",
                                                            "sharpness"};

FeatureTuple extract_features(const ImageBuffer& img);

/// Mean Sobel gradient magnitude over a luma plane, edges replicated.
double mean_gradient_magnitude(const Plane& luma);

/// Structural similarity on luma: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 255, averaged over all full windows.
///
/// Requires equal dimensions and at least 11x11 pixels.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// Same windowing as ssim() applied to the R, G and B planes separately and
/// averaged. Sensitive to chroma changes that leave luma untouched.
double ssim_rgb(const ImageBuffer& a, const ImageBuffer& b);

/// SSIM between two equally sized planes.
double ssim_planes(const Plane& a, const Plane& b);

inline constexpr int kTileCols = 4;
inline constexpr int kTileRows = 3;
inline constexpr int kTileCount = kTileCols * kTileRows;

struct TileRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// 4 x 3 partition in row-major order; the last column and row absorb any
/// remainder pixels.
std::array<TileRect, kTileCount> tile_grid(int width, int height);

std::vector<ImageBuffer> split_tiles(const ImageBuffer& img);

/// Inverse of split_tiles for a frame of the given size.
ImageBuffer join_tiles(const std::vector<ImageBuffer>& tiles, int width, int height);

ImageBuffer crop(const ImageBuffer& img, const TileRect& rect);

std::array<FeatureTuple, kTileCount> tile_features(const ImageBuffer& img);

}  // namespace camknob
