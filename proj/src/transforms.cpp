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

#include "camknob/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camknob {

namespace {

void check_factor(double factor) {
  if (!std::isfinite(factor) || factor < 0.0) {
    throw std::invalid_argument("knob factor must be finite and >= 0");
  }
}

double mean_luma(const ImageBuffer& img) {
  double sum = 0.0;
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) sum += luma_of(img.data.data() + 3 * i);
  return sum / static_cast<double>(n);
}

// Smoothing filter evaluated as an integer tap sum over 13, so every output
// carries a single rounding.
std::vector<double> smooth_filter(const ImageBuffer& img) {
  const int w = img.width;
  const int h = img.height;
  std::vector<double> out(img.data.size());
  for (int y = 0; y < h; ++y) {
    const int rows[3] = {std::max(y - 1, 0), y, std::min(y + 1, h - 1)};
    for (int x = 0; x < w; ++x) {
      const int cols[3] = {std::max(x - 1, 0), x, std::min(x + 1, w - 1)};
      int acc[3] = {0, 0, 0};
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const int wgt = (ky == 1 && kx == 1) ? 5 : 1;
          const std::uint8_t* p = img.px(cols[kx], rows[ky]);
          for (int c = 0; c < 3; ++c) acc[c] += wgt * p[c];
        }
      }
      const std::size_t o = 3 * (static_cast<std::size_t>(y) * w + x);
      for (int c = 0; c < 3; ++c) out[o + c] = acc[c] / 13.0;
    }
  }
  return out;
}

}  // namespace

ImageBuffer apply_knob(const ImageBuffer& img, Knob knob, double factor) {
  img.validate();
  check_factor(factor);
  if (factor == 1.0) return img;

  ImageBuffer out = img;
  const std::size_t n = img.pixel_count();
  const double keep = factor;
  const double mix = 1.0 - factor;
  const std::uint8_t* src = img.data.data();
  std::uint8_t* dst = out.data.data();

  switch (knob) {
    case Knob::Brightness:
      for (std::size_t i = 0; i < 3 * n; ++i) dst[i] = to_u8(keep * src[i]);
      break;
    case Knob::Contrast: {
      const double base = mix * mean_luma(img);
      for (std::size_t i = 0; i < 3 * n; ++i) dst[i] = to_u8(base + keep * src[i]);
      break;
    }
    case Knob::ColorSaturation:
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = src + 3 * i;
        const double gray = mix * luma_of(p);
        dst[3 * i + 0] = to_u8(gray + keep * p[0]);
        dst[3 * i + 1] = to_u8(gray + keep * p[1]);
        dst[3 * i + 2] = to_u8(gray + keep * p[2]);
      }
      break;
    case Knob::Sharpness: {
      const std::vector<double> smooth = smooth_filter(img);
      for (std::size_t i = 0; i < 3 * n; ++i) dst[i] = to_u8(mix * smooth[i] + keep * src[i]);
      break;
    }
  }
  return out;
}

ImageBuffer apply_config(const ImageBuffer& img, const KnobConfig& config) {
  img.validate();
  ImageBuffer out = img;
  for (Knob k : kAllKnobs) {
    if (config[k] != 1.0) out = apply_knob(out, k, config[k]);
  }
  return out;
}

Plane to_luma(const ImageBuffer& img) {
  img.validate();
  Plane plane(img.width, img.height);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) plane.values[i] = luma_of(img.data.data() + 3 * i);
  return plane;
}

Plane saturation_channel(const ImageBuffer& img) {
  img.validate();
  Plane plane(img.width, img.height);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = img.data.data() + 3 * i;
    const int hi = std::max({p[0], p[1], p[2]});
    const int lo = std::min({p[0], p[1], p[2]});
    plane.values[i] = hi == 0 ? 0.0 : static_cast<double>(hi - lo) / hi;
  }
  return plane;
}

std::vector<double> convolve3x3_exact(const ImageBuffer& img, const Kernel3x3& kernel) {
  img.validate();
  const int w = img.width;
  const int h = img.height;
  std::vector<double> out(img.data.size());
  for (int y = 0; y < h; ++y) {
    const int rows[3] = {std::max(y - 1, 0), y, std::min(y + 1, h - 1)};
    for (int x = 0; x < w; ++x) {
      const int cols[3] = {std::max(x - 1, 0), x, std::min(x + 1, w - 1)};
      double acc[3] = {0.0, 0.0, 0.0};
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wgt = kernel[ky * 3 + kx];
          const std::uint8_t* p = img.px(cols[kx], rows[ky]);
          acc[0] += wgt * p[0];
          acc[1] += wgt * p[1];
          acc[2] += wgt * p[2];
        }
      }
      const std::size_t o = 3 * (static_cast<std::size_t>(y) * w + x);
      out[o] = acc[0];
      out[o + 1] = acc[1];
      out[o + 2] = acc[2];
    }
  }
  return out;
}

ImageBuffer convolve3x3(const ImageBuffer& img, const Kernel3x3& kernel) {
  const std::vector<double> exact = convolve3x3_exact(img, kernel);
  ImageBuffer out = img;
  for (std::size_t i = 0; i < exact.size(); ++i) out.data[i] = to_u8(exact[i]);
  return out;
}

}  // namespace camknob
