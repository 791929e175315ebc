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

#include "camknob/image.hpp"

#include <sstream>
#include <stdexcept>

namespace camknob {

std::string_view knob_name(Knob knob) {
  switch (knob) {
    case Knob::Brightness:
      return "brightness";
    case Knob::Contrast:
      return "contrast";
    case Knob::ColorSaturation:
      return "color_saturation";
    case Knob::Sharpness:
      return "sharpness";
  }
  return "unknown";
}

std::optional<Knob> parse_knob(std::string_view name) {
  for (Knob k : kAllKnobs) {
    if (knob_name(k) == name) return k;
  }
  if (name == "color" || name == "saturation") return Knob::ColorSaturation;
  return std::nullopt;
}

ImageBuffer::ImageBuffer(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w > 0 ? w : 0) * (h > 0 ? h : 0) * 3, fill) {}

void ImageBuffer::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image has no pixels");
  if (data.size() != pixel_count() * 3) {
    throw std::invalid_argument("image data length does not match width*height*3");
  }
}

double& KnobConfig::operator[](Knob k) {
  switch (k) {
    case Knob::Brightness:
      return brightness;
    case Knob::Contrast:
      return contrast;
    case Knob::ColorSaturation:
      return color_saturation;
    case Knob::Sharpness:
      break;
  }
  return sharpness;
}

double KnobConfig::operator[](Knob k) const { return const_cast<KnobConfig&>(*this)[k]; }

std::string to_string(const KnobConfig& config) {
  std::ostringstream os;
  os << '<' << config.brightness << ',' << config.contrast << ',' << config.color_saturation << ','
     << config.sharpness << '>';
  return os.str();
}

bool within_knob_ranges(const KnobConfig& config) {
  for (Knob k : kAllKnobs) {
    if (!knob_range(k).contains(config[k])) return false;
  }
  return true;
}

int& CameraParams::operator[](Knob k) {
  switch (k) {
    case Knob::Brightness:
      return brightness;
    case Knob::Contrast:
      return contrast;
    case Knob::ColorSaturation:
      return color_saturation;
    case Knob::Sharpness:
      break;
  }
  return sharpness;
}

int CameraParams::operator[](Knob k) const { return const_cast<CameraParams&>(*this)[k]; }

}  // namespace camknob
