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

#include "camknob/scene.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "camknob/errors.hpp"
#include "camknob/image_io.hpp"
#include "camknob/transforms.hpp"

namespace camknob {

double DayProfile::light(int interval) const {
  if (shape == Shape::Flat) return 1.0;
  const double hour = interval * kIntervalSeconds / 3600.0;
  const double phase = std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
  return light_min + (1.0 - light_min) * 0.5 * (1.0 + phase);
}

std::array<double, 4> DayProfile::relative(int interval) const {
  const double l = light(interval);
  return {l, std::pow(l, 1.2), 0.3 + 0.7 * l, std::pow(l, 1.3)};
}

std::vector<int> SceneSpec::every_nth_interval(int n) {
  std::vector<int> out;
  for (int i = 0; i < kIntervalsPerDay; i += n) out.push_back(i);
  return out;
}

void SceneSpec::validate() const {
  if (width < 32 || height < 32) throw ConfigError("scene must be at least 32x32 pixels");
  if (intervals.empty()) throw ConfigError("scene needs at least one interval");
  for (int i : intervals) {
    if (i < 0 || i >= kIntervalsPerDay) throw ConfigError("scene interval out of range: " + std::to_string(i));
  }
  if (frames_per_interval < 1) throw ConfigError("frames_per_interval must be >= 1");
  if (!(noise >= 0.0)) throw ConfigError("noise must be >= 0");
  if (objects < 1 || objects > 12) throw ConfigError("objects must lie in [1, 12]");
  if (classes < 1) throw ConfigError("classes must be >= 1");
  if (!(profile.light_min > 0.6 && profile.light_min <= 1.0)) throw ConfigError("light_min must lie in (0.6, 1]");
}

namespace {

struct Rgb {
  double r, g, b;
};

constexpr std::array<Rgb, 6> kPalette = {{{200, 60, 50}, {50, 150, 70}, {60, 80, 190},
                                          {210, 170, 40}, {150, 60, 170}, {40, 160, 170}}};

std::uint8_t u8(double v) { return to_u8(v); }

}  // namespace

GeneratedScene compose_scene(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width;
  const int h = spec.height;
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) / w;
      const double gy = static_cast<double>(y) / h;
      const double texture = 10.0 * std::sin(x * 0.9) * std::sin(y * 0.7) + (((x / 6) + (y / 6)) % 2 ? 6.0 : -6.0);
      img.set(x, y, u8(70 + 40 * gx + texture), u8(85 + 30 * gy + texture), u8(105 - 25 * gx + texture));
    }
  }

  std::mt19937_64 rng(spec.seed);
  GeneratedScene scene;
  const int cols = std::min(spec.objects, 4);
  const int rows = (spec.objects + cols - 1) / cols;
  const double cell_w = static_cast<double>(w) / cols;
  const double cell_h = static_cast<double>(h) / rows;
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  for (int i = 0; i < spec.objects; ++i) {
    const double cx = (i % cols + 0.5) * cell_w + (jitter(rng) - 0.5) * 0.2 * cell_w;
    const double cy = (i / cols + 0.5) * cell_h + (jitter(rng) - 0.5) * 0.2 * cell_h;
    const double bw = cell_w * (0.45 + 0.2 * jitter(rng));
    const double bh = cell_h * (0.45 + 0.2 * jitter(rng));
    BoundingBox box;
    box.x_min = std::round(cx - bw / 2);
    box.y_min = std::round(cy - bh / 2);
    box.x_max = std::round(cx + bw / 2);
    box.y_max = std::round(cy + bh / 2);
    box.class_id = i % spec.classes;
    const Rgb c = kPalette[static_cast<std::size_t>(i) % kPalette.size()];
    const bool ellipse = box.class_id % 2 == 1;
    for (int y = static_cast<int>(box.y_min); y < static_cast<int>(box.y_max); ++y) {
      for (int x = static_cast<int>(box.x_min); x < static_cast<int>(box.x_max); ++x) {
        const double u = (x + 0.5 - cx) / (bw / 2);
        const double v = (y + 0.5 - cy) / (bh / 2);
        if (ellipse && u * u + v * v > 1.0) continue;
        const bool rim = ellipse ? u * u + v * v > 0.6 : std::max(std::abs(u), std::abs(v)) > 0.8;
        const double k = rim ? 0.6 : 1.0;
        const double stripe = ((x + y) / 3) % 2 ? 12.0 : 0.0;
        img.set(x, y, u8(c.r * k + stripe), u8(c.g * k + stripe), u8(c.b * k + stripe));
      }
    }
    scene.descriptor.boxes.push_back(box);
  }
  scene.base = std::move(img);
  scene.descriptor.reference = extract_features(add_noise(scene.base, spec.noise, spec.seed ^ 0x5eedULL));
  scene.plan = plan_day(spec, scene.base, scene.descriptor.reference);
  return scene;
}

ImageBuffer add_noise(const ImageBuffer& img, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) return img;
  ImageBuffer out = img;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& v : out.data) v = to_u8(v + n(rng));
  return out;
}

std::vector<IntervalPlan> plan_day(const SceneSpec& spec, const ImageBuffer& base, const FeatureTuple& reference) {
  std::vector<IntervalPlan> plan;
  for (int interval : spec.intervals) {
    IntervalPlan p;
    p.interval = interval;
    p.light = spec.profile.light(interval);
    const auto rel = spec.profile.relative(interval);
    for (std::size_t i = 0; i < 4; ++i) p.target[i] = rel[i] * reference[i];

    KnobConfig c;
    for (int iter = 0; iter < 40; ++iter) {
      const FeatureTuple f =
          extract_features(add_noise(apply_config(base, c), spec.noise, spec.seed ^ 0x5eedULL));
      double worst = 0.0;
      for (Knob k : kAllKnobs) {
        const auto i = static_cast<std::size_t>(k);
        const double ratio = p.target[i] / std::max(f[i], 1e-6);
        worst = std::max(worst, std::abs(ratio - 1.0));
        const KnobRange r = knob_range(k);
        c[k] = std::clamp(c[k] * ratio, r.lo, r.hi);
      }
      if (worst < 2e-3) break;
    }
    p.config = c;
    plan.push_back(p);
  }
  return plan;
}

namespace {

std::string frame_id(int interval, int seq) {
  const int s = interval * kIntervalSeconds;
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%02d%02d%02d_%04d", s / 3600, (s / 60) % 60, s % 60, seq);
  return buf;
}

nlohmann::json features_json(const FeatureTuple& f) {
  nlohmann::json j;
  for (std::size_t i = 0; i < 4; ++i) j[kFeatureNames[i]] = f[i];
  return j;
}

FeatureTuple features_from_json(const nlohmann::json& j) {
  FeatureTuple f;
  for (std::size_t i = 0; i < 4; ++i) f[i] = j.at(kFeatureNames[i]).get<double>();
  return f;
}

}  // namespace

FrameCorpus generate_scene(const SceneSpec& spec, const std::filesystem::path& out_dir) {
  const GeneratedScene scene = compose_scene(spec);
  const auto frames_dir = out_dir / "frames";
  std::error_code ec;
  std::filesystem::create_directories(frames_dir, ec);
  if (ec) throw DataError("cannot create " + frames_dir.string() + ": " + ec.message());

  BoxRecords gt;
  std::ofstream profile(out_dir / "profile.csv");
  if (!profile) throw DataError("cannot write " + (out_dir / "profile.csv").string());
  profile.precision(8);
  profile << "interval,time,light,target_brightness,target_contrast,target_color_saturation,target_sharpness,"
             "measured_brightness,measured_contrast,measured_color_saturation,measured_sharpness\n";

  std::vector<FrameRecord> records;
  for (const IntervalPlan& p : scene.plan) {
    const ImageBuffer rendered = apply_config(scene.base, p.config);
    std::array<double, 4> measured{};
    for (int seq = 0; seq < spec.frames_per_interval; ++seq) {
      const std::string id = frame_id(p.interval, seq);
      const std::uint64_t frame_seed = spec.seed * 1000003ULL + static_cast<std::uint64_t>(p.interval) * 1009ULL + seq;
      ImageBuffer frame = add_noise(rendered, spec.noise, frame_seed);
      const FeatureTuple f = extract_features(frame);
      for (std::size_t i = 0; i < 4; ++i) measured[i] += f[i] / spec.frames_per_interval;
      const auto path = frames_dir / (id + ".png");
      write_png(frame, path);
      gt[id] = scene.descriptor.boxes;
      FrameRecord rec;
      rec.path = path;
      rec.id = id;
      rec.seconds = p.interval * kIntervalSeconds;
      rec.seq = seq;
      records.push_back(rec);
    }
    profile << p.interval << ',' << TimeOfDay::of_interval(p.interval).to_string() << ',' << p.light;
    for (double t : p.target) profile << ',' << t;
    for (double m : measured) profile << ',' << m;
    profile << '\n';
  }
  write_box_records(gt, out_dir / "gt.jsonl");

  nlohmann::json doc;
  doc["kind"] = "scene";
  doc["width"] = spec.width;
  doc["height"] = spec.height;
  doc["reference"] = features_json(scene.descriptor.reference);
  doc["frames_per_interval"] = spec.frames_per_interval;
  doc["intervals"] = spec.intervals;
  doc["seed"] = spec.seed;
  nlohmann::json boxes = nlohmann::json::array();
  for (const BoundingBox& b : scene.descriptor.boxes) boxes.push_back(box_to_json(b, false));
  doc["boxes"] = std::move(boxes);
  std::ofstream(out_dir / "scene.json") << doc.dump(2) << '\n';

  spdlog::info("generated {} frames over {} intervals in {}", records.size(), scene.plan.size(), out_dir.string());
  return FrameCorpus(std::move(records));
}

GtOracle load_scene_oracle(const std::filesystem::path& scene_dir) {
  std::ifstream in(scene_dir / "scene.json");
  if (!in) throw DataError("missing " + (scene_dir / "scene.json").string());
  FeatureTuple reference;
  try {
    reference = features_from_json(nlohmann::json::parse(in).at("reference"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad scene.json: " + std::string(e.what()));
  }
  auto records = std::make_shared<BoxRecords>(read_box_records(scene_dir / "gt.jsonl"));
  return [records, reference](const std::string& tag) -> std::optional<SceneDescriptor> {
    const auto it = records->find(tag);
    if (it == records->end()) return std::nullopt;
    return SceneDescriptor{it->second, reference};
  };
}

}  // namespace camknob
