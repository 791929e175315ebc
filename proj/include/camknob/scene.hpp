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
#include <cstdint>
#include <filesystem>
#include <vector>

#include "camknob/deteval.hpp"
#include "camknob/image.hpp"
#include "camknob/metrics.hpp"
#include "camknob/vcam.hpp"

namespace camknob {

/// Illumination over a simulated day and the feature levels it implies,
/// relative to the scene's reference (full-light) appearance.
struct DayProfile {
  enum class Shape { Day, Flat };
  Shape shape = Shape::Day;
  double light_min = 0.68;  // darkest hour, relative to midday
  double peak_hour = 13.0;

  /// Light level in [light_min, 1] at the start of an interval.
  double light(int interval) const;

  /// Relative target per feature: brightness L, contrast L^1.2,
  /// color saturation 0.3 + 0.7 L, sharpness L^1.3.
  std::array<double, 4> relative(int interval) const;
};

struct SceneSpec {
  int width = 128;
  int height = 96;
  std::vector<int> intervals = every_nth_interval(8);
  int frames_per_interval = 20;
  double noise = 1.0;  // sensor noise standard deviation, 8-bit units
  int objects = 5;
  int classes = 2;
  DayProfile profile;
  std::uint64_t seed = 7;

  static std::vector<int> every_nth_interval(int n);
  /// Throws ConfigError for unusable values.
  void validate() const;
};

struct IntervalPlan {
  int interval = 0;
  double light = 1.0;
  std::array<double, 4> target{};  // absolute feature targets
  KnobConfig config;               // knob settings that realize the target
};

struct GeneratedScene {
  ImageBuffer base;
  SceneDescriptor descriptor;
  std::vector<IntervalPlan> plan;
};

/// Reference image of the scene with its object boxes.
GeneratedScene compose_scene(const SceneSpec& spec);

/// Solves, per interval, the knob configuration whose rendering of the base
/// image hits the profile's feature targets.
std::vector<IntervalPlan> plan_day(const SceneSpec& spec, const ImageBuffer& base, const FeatureTuple& reference);

/// Writes frames/, gt.jsonl, scene.json and profile.csv under out_dir and
/// returns the frame corpus.
FrameCorpus generate_scene(const SceneSpec& spec, const std::filesystem::path& out_dir);

/// Loads scene.json and gt.jsonl from a generated scene directory.
GtOracle load_scene_oracle(const std::filesystem::path& scene_dir);

/// Per-pixel Gaussian noise, rounded and clamped.
ImageBuffer add_noise(const ImageBuffer& img, double sigma, std::uint64_t seed);

}  // namespace camknob
