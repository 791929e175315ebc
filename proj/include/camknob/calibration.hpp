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
#include <chrono>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "camknob/image.hpp"

namespace camknob {

/// A camera whose four parameters can be set programmatically (0..100).
/// Access is not thread-safe; callers serialize set/capture.
class CameraDevice {
 public:
  virtual ~CameraDevice() = default;

  virtual void set_param(Knob knob, int value) = 0;
  virtual int get_param(Knob knob) const = 0;
  virtual ImageBuffer capture() = 0;

  /// Setting the vendor recommends; calibration captures its reference here.
  virtual int default_value(Knob /*knob*/) const { return 50; }
};

/// Maps a camera setting in [0, 100] to the knob factor it physically produces.
using HiddenMap = std::function<double(int)>;

/// Quadratic through (0, at0), (50, at50) and (100, at100). Convex when the
/// upper half rises more than the lower half, concave when it rises less.
HiddenMap three_point_map(double at0, double at50, double at100);

/// Test double for a physical camera: capture() renders the base scene with
/// the knob configuration its hidden maps assign to the current settings.
class SyntheticCamera : public CameraDevice {
 public:
  SyntheticCamera(ImageBuffer base_scene, std::array<HiddenMap, 4> hidden_maps, CameraParams defaults = {},
                  std::chrono::milliseconds set_latency = std::chrono::milliseconds{0});

  void set_param(Knob knob, int value) override;
  int get_param(Knob knob) const override { return params_[knob]; }
  ImageBuffer capture() override;
  int default_value(Knob knob) const override { return defaults_[knob]; }

  KnobConfig hidden_config() const;
  double hidden_factor(Knob knob, int value) const { return maps_[static_cast<int>(knob)](value); }

 private:
  ImageBuffer base_;
  std::array<HiddenMap, 4> maps_;
  CameraParams defaults_;
  CameraParams params_;
  std::chrono::milliseconds latency_;
};

struct CalibrationPoint {
  int camera_value = 0;
  double factor = 1.0;
  double best_ssim = 0.0;
};

struct CalibrationResult {
  Knob knob = Knob::Brightness;
  std::vector<CalibrationPoint> points;  // sorted by camera_value
  bool low_confidence = false;           // SSIM barely varied over the grid (flat scene)
};

enum class Similarity {
  Auto,   // luma SSIM, except per-channel SSIM for color saturation
  Luma,
  Rgb,
};

struct CalibrationOptions {
  Similarity similarity = Similarity::Auto;
  /// Spread of SSIM over the grid below which the match is flagged.
  double low_confidence_spread = 1e-4;
};

/// Evenly spaced grid over the knob's camera-equivalent range.
std::vector<double> knob_grid(Knob knob, double step = 0.05);

/// 0, 10, ..., 100.
std::vector<int> default_camera_values();

/// For each camera value p: capture im_p and keep the grid factor d whose
/// knob-transformed reference (captured at the default setting) is most
/// similar to im_p. Ties go to the factor nearest 1.0. The knob under test
/// is restored to its default afterwards.
CalibrationResult calibrate(CameraDevice& cam, Knob knob, std::span<const int> camera_values,
                            std::span<const double> grid, const CalibrationOptions& options = {});

/// Calibration results for every calibrated parameter.
using KnobMap = std::map<Knob, CalibrationResult>;

/// {param: [[camera_value, factor, best_ssim], ...]}
nlohmann::json knob_map_to_json(const KnobMap& map);
KnobMap knob_map_from_json(const nlohmann::json& doc);

/// Piecewise-linear lookup of the factor for a camera value.
double factor_for_camera_value(const CalibrationResult& result, double camera_value);

}  // namespace camknob
