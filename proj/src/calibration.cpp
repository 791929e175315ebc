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

#include "camknob/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "camknob/metrics.hpp"
#include "camknob/transforms.hpp"

namespace camknob {

HiddenMap three_point_map(double at0, double at50, double at100) {
  // g(p) = at0 + a p + b p^2
  const double b = (at100 - at0 - 2.0 * (at50 - at0)) / 5000.0;
  const double a = ((at50 - at0) - 2500.0 * b) / 50.0;
  return [at0, a, b](int p) { return at0 + a * p + b * static_cast<double>(p) * p; };
}

SyntheticCamera::SyntheticCamera(ImageBuffer base_scene, std::array<HiddenMap, 4> hidden_maps, CameraParams defaults,
                                 std::chrono::milliseconds set_latency)
    : base_(std::move(base_scene)),
      maps_(std::move(hidden_maps)),
      defaults_(defaults),
      params_(defaults),
      latency_(set_latency) {
  base_.validate();
  for (const auto& m : maps_) {
    if (!m) throw std::invalid_argument("SyntheticCamera: every parameter needs a hidden map");
  }
}

void SyntheticCamera::set_param(Knob knob, int value) {
  if (value < 0 || value > 100) throw std::out_of_range("camera parameter outside [0, 100]");
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  params_[knob] = value;
}

KnobConfig SyntheticCamera::hidden_config() const {
  KnobConfig cfg;
  for (Knob k : kAllKnobs) cfg[k] = maps_[static_cast<int>(k)](params_[k]);
  return cfg;
}

ImageBuffer SyntheticCamera::capture() {
  ImageBuffer frame = apply_config(base_, hidden_config());
  frame.tag = base_.tag;
  return frame;
}

std::vector<double> knob_grid(Knob knob, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("knob grid step must be positive");
  const KnobRange r = knob_range(knob);
  const int n = static_cast<int>(std::floor(r.width() / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (int i = 0; i <= n; ++i) grid.push_back(std::round((r.lo + i * step) * 1e9) / 1e9);
  if (r.hi - grid.back() > 1e-9) grid.push_back(r.hi);
  return grid;
}

std::vector<int> default_camera_values() {
  std::vector<int> v;
  for (int p = 0; p <= 100; p += 10) v.push_back(p);
  return v;
}

namespace {

std::vector<Plane> similarity_planes(const ImageBuffer& img, bool rgb) {
  if (!rgb) return {to_luma(img)};
  std::vector<Plane> planes(3, Plane(img.width, img.height));
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) planes[c].values[i] = img.data[3 * i + c];
  }
  return planes;
}

double similarity(const std::vector<Plane>& a, const std::vector<Plane>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += ssim_planes(a[i], b[i]);
  return total / static_cast<double>(a.size());
}

}  // namespace

CalibrationResult calibrate(CameraDevice& cam, Knob knob, std::span<const int> camera_values,
                            std::span<const double> grid, const CalibrationOptions& options) {
  if (grid.empty()) throw std::invalid_argument("calibrate: empty knob grid");
  for (int p : camera_values) {
    if (p < 0 || p > 100) throw std::invalid_argument("calibrate: camera values must lie in [0, 100]");
  }
  const bool rgb = options.similarity == Similarity::Rgb ||
                   (options.similarity == Similarity::Auto && knob == Knob::ColorSaturation);

  for (Knob k : kAllKnobs) cam.set_param(k, cam.default_value(k));
  const ImageBuffer reference = cam.capture();
  reference.validate();

  std::vector<std::vector<Plane>> candidates;
  candidates.reserve(grid.size());
  for (double d : grid) candidates.push_back(similarity_planes(apply_knob(reference, knob, d), rgb));

  CalibrationResult result;
  result.knob = knob;
  std::vector<int> values(camera_values.begin(), camera_values.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  for (int p : values) {
    cam.set_param(knob, p);
    const std::vector<Plane> captured = similarity_planes(cam.capture(), rgb);

    std::size_t best = 0;
    double best_score = -2.0;
    double worst_score = 2.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = similarity(captured, candidates[i]);
      worst_score = std::min(worst_score, s);
      const bool better = s > best_score;
      const bool tie_closer = s == best_score && std::abs(grid[i] - 1.0) < std::abs(grid[best] - 1.0);
      if (better || tie_closer) {
        best = i;
        best_score = s;
      }
    }
    if (best_score - worst_score < options.low_confidence_spread) result.low_confidence = true;
    result.points.push_back({p, grid[best], best_score});
  }
  cam.set_param(knob, cam.default_value(knob));
  return result;
}

nlohmann::json knob_map_to_json(const KnobMap& map) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [knob, result] : map) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CalibrationPoint& pt : result.points) rows.push_back({pt.camera_value, pt.factor, pt.best_ssim});
    doc[std::string(knob_name(knob))] = std::move(rows);
  }
  return doc;
}

KnobMap knob_map_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("knob map JSON must be an object");
  KnobMap map;
  for (const auto& [name, rows] : doc.items()) {
    const auto knob = parse_knob(name);
    if (!knob) throw std::invalid_argument("unknown parameter in knob map: " + name);
    CalibrationResult result;
    result.knob = *knob;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 3) throw std::invalid_argument("knob map rows are [value, factor, ssim]");
      result.points.push_back({row[0].get<int>(), row[1].get<double>(), row[2].get<double>()});
    }
    std::sort(result.points.begin(), result.points.end(),
              [](const auto& a, const auto& b) { return a.camera_value < b.camera_value; });
    for (std::size_t i = 1; i < result.points.size(); ++i) {
      if (result.points[i].camera_value == result.points[i - 1].camera_value) {
        throw std::invalid_argument("duplicate camera value in knob map");
      }
    }
    map.emplace(*knob, std::move(result));
  }
  return map;
}

double factor_for_camera_value(const CalibrationResult& result, double camera_value) {
  const auto& pts = result.points;
  if (pts.empty()) throw std::invalid_argument("empty calibration");
  if (camera_value <= pts.front().camera_value) return pts.front().factor;
  if (camera_value >= pts.back().camera_value) return pts.back().factor;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (camera_value <= pts[i].camera_value) {
      const double t = (camera_value - pts[i - 1].camera_value) / (pts[i].camera_value - pts[i - 1].camera_value);
      return pts[i - 1].factor + t * (pts[i].factor - pts[i - 1].factor);
    }
  }
  return pts.back().factor;
}

}  // namespace camknob
