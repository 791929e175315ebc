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

#include "camknob/abeval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>

#include "camknob/errors.hpp"
#include "camknob/parallel.hpp"
#include "camknob/transforms.hpp"

namespace camknob {

VcDayEnv::VcDayEnv(std::vector<int> intervals, std::vector<std::vector<ImageBuffer>> frames, int source_interval)
    : intervals_(std::move(intervals)), frames_(std::move(frames)), source_interval_(source_interval) {
  if (intervals_.size() != frames_.size()) throw std::invalid_argument("one frame list per interval required");
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    for (std::size_t k = 0; k < frames_[t].size(); ++k) schedule_.emplace_back(static_cast<int>(t), static_cast<int>(k));
  }
  if (schedule_.empty()) throw DataError("simulated day has no frames");
}

const ImageBuffer& VcDayEnv::raw_frame(int i) const {
  const auto [t, k] = frame_slot(i);
  return frames_[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
}

void VcDayEnv::set_tick_frames(int n) {
  if (n < 1) throw std::invalid_argument("tick_frames must be >= 1");
  tick_frames_ = n;
}

ImageBuffer VcDayEnv::produce_frame() { return apply_config(raw_frame(frame_), knobs_); }

void VcDayEnv::advance() { frame_ = (frame_ + tick_frames_) % frame_count(); }

void VcDayEnv::reset() {
  frame_ = 0;
  knobs_ = KnobConfig::identity();
}

int brightest_interval(const VcTable& vc) {
  const auto present = vc.present();
  if (present.empty()) throw DataError("VC table is empty");
  int best = present.front();
  for (int t : present) {
    if (vc.mean_features(t).brightness > vc.mean_features(best).brightness) best = t;
  }
  return best;
}

VcDayEnv simulate_day(const FrameCorpus& corpus, const VcTable& vc, const DeltaTable& dt, int source_interval) {
  const auto sources = corpus.frames_in(source_interval);
  if (sources.empty()) throw DataError("no frames in source interval " + std::to_string(source_interval));
  std::vector<ImageBuffer> originals;
  for (const FrameRecord* r : sources) originals.push_back(FrameCorpus::load(*r));

  const std::vector<int> intervals = vc.present();
  std::vector<std::vector<ImageBuffer>> frames(intervals.size());
  const TimeOfDay t1 = TimeOfDay::of_interval(source_interval);
  parallel_for(intervals.size(), [&](std::size_t i) {
    const TimeOfDay t2 = TimeOfDay::of_interval(intervals[i]);
    for (const ImageBuffer& img : originals) frames[i].push_back(render_to_time(img, t1, t2, vc, dt).frame);
  });
  return VcDayEnv(intervals, std::move(frames), source_interval);
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<BoundingBox> gt_boxes(const GtOracle& gt, const ImageBuffer& img) {
  const auto scene = gt(img.tag);
  if (!scene) throw DataError("no ground truth for frame '" + img.tag + "'");
  return scene->boxes;
}

}  // namespace

AbReport ab_evaluate(VcDayEnv& env, const GtOracle& gt, Detector& detector, QualityEstimator& estimator,
                     const AbOptions& options) {
  if (options.training_passes < 0) throw std::invalid_argument("training_passes must be >= 0");
  SarsaAgent agent(options.agent);

  std::vector<FeatureTuple> warmup;
  for (int i = 0; i < env.frame_count(); ++i) warmup.push_back(extract_features(env.raw_frame(i)));
  const StateEncoder encoder(FeatureBins::fit(warmup), agent.cfg.steps);
  const EpisodeOptions episode{env.ticks(), true};

  AbReport report;
  report.source_interval = env.source_interval();
  for (int pass = 0; pass < options.training_passes; ++pass) {
    env.reset();
    for (TraceRow row : run_episode(env, estimator, agent, encoder, episode)) {
      row.step += pass * env.ticks();
      report.training_trace.push_back(row);
    }
    spdlog::debug("training pass {} done, {} states", pass + 1, agent.q.size());
  }
  env.reset();
  report.trace = run_episode(env, estimator, agent, encoder, episode);

  const auto& intervals = env.intervals();
  std::vector<std::vector<double>> base_q(intervals.size());
  std::vector<std::vector<double>> tuned_q(intervals.size());
  std::vector<std::vector<FrameBoxes>> base_boxes(intervals.size());
  std::vector<std::vector<FrameBoxes>> tuned_boxes(intervals.size());
  std::vector<std::array<double, 4>> knob_sum(intervals.size());
  std::vector<int> counts(intervals.size(), 0);
  std::vector<int> first_frame(intervals.size(), -1);
  int unavailable = 0;

  auto score = [&](const ImageBuffer& img, std::vector<double>& qualities) {
    try {
      qualities.push_back(estimator.estimate(img).value);
    } catch (const EstimatorUnavailable&) {
      ++unavailable;
    }
  };

  for (int i = 0; i < env.frame_count(); ++i) {
    const auto slot = static_cast<std::size_t>(env.frame_slot(i).first);
    const ImageBuffer& raw = env.raw_frame(i);
    const KnobConfig knobs = report.trace[static_cast<std::size_t>(i / env.tick_frames())].knobs;
    const ImageBuffer tuned = apply_config(raw, knobs);
    const auto truth = gt_boxes(gt, raw);
    score(raw, base_q[slot]);
    score(tuned, tuned_q[slot]);
    base_boxes[slot].push_back({detector.detect(raw), truth});
    tuned_boxes[slot].push_back({detector.detect(tuned), truth});
    const auto a = knobs.as_array();
    for (std::size_t i = 0; i < 4; ++i) knob_sum[slot][i] += a[i];
    if (counts[slot]++ == 0) first_frame[slot] = i;
  }
  if (unavailable > 0) spdlog::warn("{} frames could not be scored by the estimator", unavailable);

  const std::vector<KnobConfig> grid = config_grid(options.upper_bound_levels);
  std::vector<double> all_base_q;
  std::vector<double> all_tuned_q;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    IntervalReport r;
    r.interval = intervals[i];
    r.baseline_quality = mean_of(base_q[i]);
    r.tuned_quality = mean_of(tuned_q[i]);
    all_base_q.insert(all_base_q.end(), base_q[i].begin(), base_q[i].end());
    all_tuned_q.insert(all_tuned_q.end(), tuned_q[i].begin(), tuned_q[i].end());
    r.baseline_map = evaluate_frames(base_boxes[i]).map;
    r.tuned_map = evaluate_frames(tuned_boxes[i]).map;
    std::array<double, 4> mean_knobs{};
    for (std::size_t k = 0; k < 4; ++k) mean_knobs[k] = knob_sum[i][k] / std::max(counts[i], 1);
    r.mean_tuned_knobs = KnobConfig::from_array(mean_knobs);

    const ImageBuffer& probe = env.raw_frame(first_frame[i]);
    const auto truth = gt_boxes(gt, probe);
    const SweepResult sweep = find_best_config(probe, truth, detector, grid);
    r.upper_bound_map = sweep.best_result.map;
    r.upper_bound_config = sweep.best;
    report.intervals.push_back(r);
  }

  report.baseline_quality = mean_of(all_base_q);
  report.tuned_quality = mean_of(all_tuned_q);
  std::vector<double> maps;
  for (const auto& r : report.intervals) maps.push_back(r.baseline_map);
  report.baseline_map = mean_of(maps);
  maps.clear();
  for (const auto& r : report.intervals) maps.push_back(r.tuned_map);
  report.tuned_map = mean_of(maps);
  maps.clear();
  for (const auto& r : report.intervals) maps.push_back(r.upper_bound_map);
  report.upper_bound_map = mean_of(maps);
  return report;
}

void write_ab_report(const AbReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  std::ofstream iv(out_dir / "intervals.csv");
  if (!iv) throw DataError("cannot write " + (out_dir / "intervals.csv").string());
  iv.precision(10);
  iv << kIntervalsHeader << '\n';
  for (const IntervalReport& r : report.intervals) {
    iv << r.interval << ',' << TimeOfDay::of_interval(r.interval).to_string() << ',' << r.baseline_quality << ','
       << r.tuned_quality << ',' << r.baseline_map << ',' << r.tuned_map << ',' << r.improvement() << ','
       << r.upper_bound_map;
    for (double v : r.mean_tuned_knobs.as_array()) iv << ',' << v;
    for (double v : r.upper_bound_config.as_array()) iv << ',' << v;
    iv << '\n';
  }

  std::vector<double> gains;
  for (const IntervalReport& r : report.intervals) gains.push_back(r.improvement());
  std::sort(gains.begin(), gains.end());
  std::ofstream cdf(out_dir / "improvement_cdf.csv");
  cdf.precision(10);
  cdf << kImprovementCdfHeader << '\n';
  for (std::size_t i = 0; i < gains.size(); ++i) {
    cdf << gains[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(gains.size()) << '\n';
  }

  write_trace_csv(report.trace, out_dir / "trace.csv");
  write_trace_csv(report.training_trace, out_dir / "training_trace.csv");

  nlohmann::json s;
  s["source_interval"] = report.source_interval;
  s["intervals"] = report.intervals.size();
  s["baseline_quality"] = report.baseline_quality;
  s["tuned_quality"] = report.tuned_quality;
  s["quality_improvement_pp"] = report.quality_improvement_pp();
  s["baseline_map"] = report.baseline_map;
  s["tuned_map"] = report.tuned_map;
  s["map_improvement_pct"] = report.tuned_map - report.baseline_map;
  s["upper_bound_map"] = report.upper_bound_map;
  std::ofstream(out_dir / "summary.json") << s.dump(2) << '\n';
}

}  // namespace camknob
