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

#include <filesystem>
#include <vector>

#include "camknob/deteval.hpp"
#include "camknob/estimator.hpp"
#include "camknob/rl.hpp"
#include "camknob/vcam.hpp"

namespace camknob {

/// Camera feed simulated by the virtual camera: a fixed set of source
/// frames re-rendered to every interval of the day. The agent acts once per
/// tick of `tick_frames` consecutive frames.
class VcDayEnv : public TunableEnv {
 public:
  /// frames[t] holds the rendered frames of the t-th simulated interval.
  VcDayEnv(std::vector<int> intervals, std::vector<std::vector<ImageBuffer>> frames, int source_interval = -1);

  KnobConfig knobs() const override { return knobs_; }
  void set_knobs(const KnobConfig& knobs) override { knobs_ = knobs; }
  ImageBuffer produce_frame() override;
  void advance() override;

  /// Back to the first frame of the day with identity knobs.
  void reset();

  void set_tick_frames(int n);
  int tick_frames() const { return tick_frames_; }

  int frame_count() const { return static_cast<int>(schedule_.size()); }
  int ticks() const { return (frame_count() + tick_frames_ - 1) / tick_frames_; }
  /// (interval slot, frame index) of the i-th frame of the day.
  std::pair<int, int> frame_slot(int i) const { return schedule_.at(static_cast<std::size_t>(i)); }
  const ImageBuffer& raw_frame(int i) const;
  const std::vector<int>& intervals() const { return intervals_; }
  int source_interval() const { return source_interval_; }

 private:
  std::vector<int> intervals_;
  std::vector<std::vector<ImageBuffer>> frames_;
  std::vector<std::pair<int, int>> schedule_;
  int source_interval_;
  int tick_frames_ = 1;
  int frame_ = 0;
  KnobConfig knobs_;
};

struct AbOptions {
  AgentConfig agent;
  int training_passes = 6;
  /// Levels per knob of the exhaustive per-interval sweep (upper bound).
  int upper_bound_levels = 3;
};

struct IntervalReport {
  int interval = 0;
  double baseline_quality = 0.0;  // mean estimate, [0, 1]
  double tuned_quality = 0.0;
  double baseline_map = 0.0;      // pooled over the interval's frames, [0, 100]
  double tuned_map = 0.0;
  double upper_bound_map = 0.0;
  KnobConfig upper_bound_config;
  KnobConfig mean_tuned_knobs;
  double improvement() const { return tuned_map - baseline_map; }
};

struct AbReport {
  int source_interval = 0;
  std::vector<IntervalReport> intervals;
  std::vector<TraceRow> trace;  // evaluation pass
  std::vector<TraceRow> training_trace;
  double baseline_quality = 0.0;
  double tuned_quality = 0.0;
  double baseline_map = 0.0;
  double tuned_map = 0.0;
  double upper_bound_map = 0.0;

  /// Mean quality gain of the tuned feed, in percentage points.
  double quality_improvement_pp() const { return 100.0 * (tuned_quality - baseline_quality); }
};

/// Renders every frame of the source interval to each interval present in
/// the VC table, producing the simulated day.
VcDayEnv simulate_day(const FrameCorpus& corpus, const VcTable& vc, const DeltaTable& dt, int source_interval);

/// Picks the interval with the highest mean brightness in the VC table.
int brightest_interval(const VcTable& vc);

/// Runs the fixed-default baseline and the SARSA-tuned feed over the same
/// simulated day. The agent learns for `training_passes` days and is scored
/// on one more. Quality comes from `estimator`, mAP from `detector` against
/// the ground truth in `gt`.
AbReport ab_evaluate(VcDayEnv& env, const GtOracle& gt, Detector& detector, QualityEstimator& estimator,
                     const AbOptions& options);

/// Writes intervals.csv, improvement_cdf.csv, trace.csv, training_trace.csv
/// and summary.json into out_dir.
void write_ab_report(const AbReport& report, const std::filesystem::path& out_dir);

inline constexpr const char* kImprovementCdfHeader = "improvement_pct,cdf";
inline constexpr const char* kIntervalsHeader =
    "interval,time,baseline_quality,tuned_quality,baseline_map,tuned_map,improvement_pct,upper_bound_map,"
    "tuned_brightness,tuned_contrast,tuned_color_saturation,tuned_sharpness,"
    "best_brightness,best_contrast,best_color_saturation,best_sharpness";

}  // namespace camknob
