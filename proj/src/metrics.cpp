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

#include "camknob/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "camknob/transforms.hpp"

namespace camknob {

double& FeatureTuple::operator[](std::size_t i) {
  switch (i) {
    case 0:
      return brightness;
    case 1:
      return contrast;
    case 2:
      return color_saturation;
    case 3:
      return sharpness;
    default:
      throw std::out_of_range("feature index");
  }
}

double FeatureTuple::operator[](std::size_t i) const { return const_cast<FeatureTuple&>(*this)[i]; }

double mean_gradient_magnitude(const Plane& luma) {
  const int w = luma.width;
  const int h = luma.height;
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      const double gx = (luma.at(xp, ym) + 2.0 * luma.at(xp, y) + luma.at(xp, yp)) -
                        (luma.at(xm, ym) + 2.0 * luma.at(xm, y) + luma.at(xm, yp));
      const double gy = (luma.at(xm, yp) + 2.0 * luma.at(x, yp) + luma.at(xp, yp)) -
                        (luma.at(xm, ym) + 2.0 * luma.at(x, ym) + luma.at(xp, ym));
      sum += std::sqrt(gx * gx + gy * gy);
    }
  }
  return sum / (static_cast<double>(w) * h);
}

FeatureTuple extract_features(const ImageBuffer& img) {
  img.validate();
  const Plane luma = to_luma(img);
  const Plane sat = saturation_channel(img);
  const double n = static_cast<double>(img.pixel_count());

  FeatureTuple f;
  double sum = 0.0;
  for (double v : luma.values) sum += v;
  f.brightness = sum / n;
  double var = 0.0;
  for (double v : luma.values) var += (v - f.brightness) * (v - f.brightness);
  f.contrast = std::sqrt(var / n);
  double sat_sum = 0.0;
  for (double v : sat.values) sat_sum += v;
  f.color_saturation = sat_sum / n;
  f.sharpness = mean_gradient_magnitude(luma);
  return f;
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable Gaussian filtering restricted to windows fully inside the plane.
Plane filter_valid(const Plane& in) {
  static const std::array<double, kWindow> taps = gaussian_taps();
  const int ow = in.width - kWindow + 1;
  const int oh = in.height - kWindow + 1;
  Plane horiz(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * in.at(x + k, y);
      horiz.at(x, y) = acc;
    }
  }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * horiz.at(x, y + k);
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

Plane channel_plane(const ImageBuffer& img, int channel) {
  Plane p(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) p.values[i] = img.data[3 * i + channel];
  return p;
}

void check_ssim_inputs(const ImageBuffer& a, const ImageBuffer& b) {
  a.validate();
  b.validate();
  if (a.width != b.width || a.height != b.height) throw std::invalid_argument("ssim: dimension mismatch");
  if (a.width < kWindow || a.height < kWindow) throw std::invalid_argument("ssim: image smaller than 11x11 window");
}

}  // namespace

double ssim_planes(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) throw std::invalid_argument("ssim: dimension mismatch");
  if (a.width < kWindow || a.height < kWindow) throw std::invalid_argument("ssim: image smaller than 11x11 window");

  const Plane mu_a = filter_valid(a);
  const Plane mu_b = filter_valid(b);
  const Plane e_aa = filter_valid(product(a, a));
  const Plane e_bb = filter_valid(product(b, b));
  const Plane e_ab = filter_valid(product(a, b));

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.values.size(); ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double var_a = e_aa.values[i] - ma * ma;
    const double var_b = e_bb.values[i] - mb * mb;
    const double cov = e_ab.values[i] - ma * mb;
    const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
    const double den = (ma * ma + mb * mb + kC1) * (var_a + var_b + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.values.size());
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  check_ssim_inputs(a, b);
  return ssim_planes(to_luma(a), to_luma(b));
}

double ssim_rgb(const ImageBuffer& a, const ImageBuffer& b) {
  check_ssim_inputs(a, b);
  double total = 0.0;
  for (int c = 0; c < 3; ++c) total += ssim_planes(channel_plane(a, c), channel_plane(b, c));
  return total / 3.0;
}

std::array<TileRect, kTileCount> tile_grid(int width, int height) {
  if (width < kTileCols || height < kTileRows) throw std::invalid_argument("frame too small to split into 4x3 tiles");
  const int tw = width / kTileCols;
  const int th = height / kTileRows;
  std::array<TileRect, kTileCount> rects{};
  for (int r = 0; r < kTileRows; ++r) {
    for (int c = 0; c < kTileCols; ++c) {
      TileRect& t = rects[r * kTileCols + c];
      t.x = c * tw;
      t.y = r * th;
      t.width = c == kTileCols - 1 ? width - t.x : tw;
      t.height = r == kTileRows - 1 ? height - t.y : th;
    }
  }
  return rects;
}

ImageBuffer crop(const ImageBuffer& img, const TileRect& rect) {
  ImageBuffer out(rect.width, rect.height);
  out.tag = img.tag;
  for (int y = 0; y < rect.height; ++y) {
    std::memcpy(out.px(0, y), img.px(rect.x, rect.y + y), static_cast<std::size_t>(rect.width) * 3);
  }
  return out;
}

std::vector<ImageBuffer> split_tiles(const ImageBuffer& img) {
  img.validate();
  std::vector<ImageBuffer> tiles;
  tiles.reserve(kTileCount);
  for (const TileRect& r : tile_grid(img.width, img.height)) tiles.push_back(crop(img, r));
  return tiles;
}

ImageBuffer join_tiles(const std::vector<ImageBuffer>& tiles, int width, int height) {
  const auto rects = tile_grid(width, height);
  if (tiles.size() != rects.size()) throw std::invalid_argument("join_tiles: expected 12 tiles");
  ImageBuffer out(width, height);
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const TileRect& r = rects[i];
    if (tiles[i].width != r.width || tiles[i].height != r.height) {
      throw std::invalid_argument("join_tiles: tile size does not match the grid");
    }
    for (int y = 0; y < r.height; ++y) {
      std::memcpy(out.px(r.x, r.y + y), tiles[i].px(0, y), static_cast<std::size_t>(r.width) * 3);
    }
  }
  if (!tiles.empty()) out.tag = tiles.front().tag;
  return out;
}

std::array<FeatureTuple, kTileCount> tile_features(const ImageBuffer& img) {
  img.validate();
  std::array<FeatureTuple, kTileCount> out{};
  const auto rects = tile_grid(img.width, img.height);
  for (std::size_t i = 0; i < rects.size(); ++i) out[i] = extract_features(crop(img, rects[i]));
  return out;
}

}  // namespace camknob
