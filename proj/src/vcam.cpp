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

#include "camknob/vcam.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <regex>

#include "camknob/image_io.hpp"
#include "camknob/parallel.hpp"
#include "camknob/transforms.hpp"

namespace camknob {

TimeOfDay TimeOfDay::parse(const std::string& text) {
  static const std::regex colon("^(\\d{1,2}):(\\d{2})(?::(\\d{2}))?$");
  static const std::regex packed("^(\\d{2})(\\d{2})(\\d{2})$");
  std::smatch m;
  int h = 0;
  int mi = 0;
  int s = 0;
  if (std::regex_match(text, m, colon)) {
    h = std::stoi(m[1]);
    mi = std::stoi(m[2]);
    s = m[3].matched ? std::stoi(m[3]) : 0;
  } else if (std::regex_match(text, m, packed)) {
    h = std::stoi(m[1]);
    mi = std::stoi(m[2]);
    s = std::stoi(m[3]);
  } else {
    throw std::invalid_argument("bad time of day: " + text);
  }
  if (h > 23 || mi > 59 || s > 59) throw std::invalid_argument("time of day out of range: " + text);
  return {h * 3600 + mi * 60 + s};
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds / 3600, (seconds / 60) % 60, seconds % 60);
  return buf;
}

std::optional<FrameRecord> parse_frame_name(const std::filesystem::path& path) {
  static const std::regex name("^frame_(\\d{6})_(\\d+)$");
  const std::string ext = path.extension().string();
  if (ext != ".png" && ext != ".ppm") return std::nullopt;
  const std::string stem = path.stem().string();
  std::smatch m;
  if (!std::regex_match(stem, m, name)) return std::nullopt;
  TimeOfDay t;
  try {
    t = TimeOfDay::parse(m[1]);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  FrameRecord rec;
  rec.path = path;
  rec.id = stem;
  rec.seconds = t.seconds;
  rec.seq = std::stoi(m[2]);
  return rec;
}

FrameCorpus::FrameCorpus(std::vector<FrameRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const FrameRecord& a, const FrameRecord& b) {
    return std::tie(a.seconds, a.seq, a.id) < std::tie(b.seconds, b.seq, b.id);
  });
}

FrameCorpus FrameCorpus::scan(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("corpus directory not found: " + dir.string());
  std::vector<FrameRecord> records;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto rec = parse_frame_name(entry.path())) records.push_back(std::move(*rec));
  }
  return FrameCorpus(std::move(records));
}

std::vector<const FrameRecord*> FrameCorpus::frames_in(int interval) const {
  std::vector<const FrameRecord*> out;
  for (const FrameRecord& r : records_) {
    if (r.interval() == interval) out.push_back(&r);
  }
  return out;
}

std::vector<int> FrameCorpus::intervals_present() const {
  std::vector<int> out;
  for (const FrameRecord& r : records_) {
    if (out.empty() || out.back() != r.interval()) out.push_back(r.interval());
  }
  return out;
}

ImageBuffer FrameCorpus::load(const FrameRecord& record) {
  ImageBuffer img = read_image(record.path);
  img.tag = record.id;
  return img;
}

bool VcTable::has(int interval) const {
  return interval >= 0 && interval < kIntervalsPerDay && slots[interval].has_value();
}

const VcTable::Slot& VcTable::at(int interval) const {
  if (!has(interval)) {
    throw DataError("VC table has no profile for interval " + std::to_string(interval) + " (" +
                    TimeOfDay::of_interval(std::clamp(interval, 0, kIntervalsPerDay - 1)).to_string() + ")");
  }
  return *slots[interval];
}

std::vector<int> VcTable::present() const {
  std::vector<int> out;
  for (int i = 0; i < kIntervalsPerDay; ++i) {
    if (slots[i]) out.push_back(i);
  }
  return out;
}

FeatureTuple VcTable::mean_features(int interval) const {
  const Slot& slot = at(interval);
  FeatureTuple mean;
  for (const FeatureTuple& t : slot.tiles) {
    for (std::size_t k = 0; k < 4; ++k) mean[k] += t[k] / kTileCount;
  }
  return mean;
}

nlohmann::json VcTable::to_json() const {
  nlohmann::json slots_json = nlohmann::json::array();
  for (int i = 0; i < kIntervalsPerDay; ++i) {
    if (!slots[i]) continue;
    nlohmann::json tiles = nlohmann::json::array();
    for (const FeatureTuple& t : slots[i]->tiles) tiles.push_back(t.as_array());
    slots_json.push_back({{"interval", i}, {"frames", slots[i]->frames}, {"tiles", std::move(tiles)}});
  }
  return {{"schema_version", kTableSchemaVersion},
          {"kind", "vc_table"},
          {"interval_seconds", kIntervalSeconds},
          {"skipped_frames", skipped_frames},
          {"slots", std::move(slots_json)}};
}

namespace {

void check_schema(const nlohmann::json& doc, const char* kind) {
  if (!doc.is_object() || doc.value("kind", "") != kind) throw DataError(std::string("not a ") + kind + " document");
  if (doc.value("schema_version", -1) != kTableSchemaVersion) {
    throw DataError(std::string(kind) + ": unsupported schema_version");
  }
}

}  // namespace

VcTable VcTable::from_json(const nlohmann::json& doc) {
  check_schema(doc, "vc_table");
  VcTable table;
  table.skipped_frames = doc.value("skipped_frames", 0);
  for (const auto& s : doc.at("slots")) {
    const int i = s.at("interval").get<int>();
    if (i < 0 || i >= kIntervalsPerDay) throw DataError("vc_table: interval index out of range");
    Slot slot;
    slot.frames = s.at("frames").get<int>();
    const auto& tiles = s.at("tiles");
    if (tiles.size() != kTileCount) throw DataError("vc_table: expected 12 tiles per interval");
    for (int t = 0; t < kTileCount; ++t) slot.tiles[t] = FeatureTuple::from_array(tiles[t].get<std::array<double, 4>>());
    table.slots[i] = slot;
  }
  return table;
}

namespace {

struct SlotAccumulator {
  std::array<std::array<double, 4>, kTileCount> sums{};
  int frames = 0;

  void add(const ImageBuffer& img) {
    const auto feats = tile_features(img);
    for (int t = 0; t < kTileCount; ++t) {
      for (std::size_t k = 0; k < 4; ++k) sums[t][k] += feats[t][k];
    }
    ++frames;
  }

  VcTable::Slot finish() const {
    VcTable::Slot slot;
    slot.frames = frames;
    for (int t = 0; t < kTileCount; ++t) {
      for (std::size_t k = 0; k < 4; ++k) slot.tiles[t][k] = sums[t][k] / frames;
    }
    return slot;
  }
};

}  // namespace

VcTable build_vc_table(const FrameCorpus& corpus) {
  VcTable table;
  const std::vector<int> intervals = corpus.intervals_present();
  std::vector<SlotAccumulator> acc(intervals.size());
  std::vector<int> skipped(intervals.size(), 0);
  parallel_for(intervals.size(), [&](std::size_t i) {
    for (const FrameRecord* rec : corpus.frames_in(intervals[i])) {
      try {
        acc[i].add(FrameCorpus::load(*rec));
      } catch (const std::exception& e) {
        ++skipped[i];
        spdlog::warn("skipping unreadable frame {}: {}", rec->path.string(), e.what());
      }
    }
  });
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    table.skipped_frames += skipped[i];
    if (acc[i].frames > 0) table.slots[intervals[i]] = acc[i].finish();
  }
  return table;
}

VcTable build_vc_table(std::span<const std::pair<int, ImageBuffer>> frames) {
  std::map<int, SlotAccumulator> acc;
  for (const auto& [interval, img] : frames) {
    if (interval < 0 || interval >= kIntervalsPerDay) throw std::invalid_argument("interval index out of range");
    acc[interval].add(img);
  }
  VcTable table;
  for (const auto& [interval, a] : acc) table.slots[interval] = a.finish();
  return table;
}

nlohmann::json DeltaTable::to_json() const {
  nlohmann::json tiles_json = nlohmann::json::array();
  for (const auto& entries : tiles) {
    nlohmann::json rows = nlohmann::json::array();
    for (const DeltaEntry& e : entries) {
      const auto c = e.config.as_array();
      rows.push_back({e.delta[0], e.delta[1], e.delta[2], e.delta[3], c[0], c[1], c[2], c[3]});
    }
    tiles_json.push_back(std::move(rows));
  }
  return {{"schema_version", kTableSchemaVersion},
          {"kind", "delta_table"},
          {"row_layout", {"delta_brightness", "delta_contrast", "delta_color_saturation", "delta_sharpness",
                          "brightness", "contrast", "color_saturation", "sharpness"}},
          {"tiles", std::move(tiles_json)}};
}

DeltaTable DeltaTable::from_json(const nlohmann::json& doc) {
  check_schema(doc, "delta_table");
  const auto& tiles = doc.at("tiles");
  if (tiles.size() != kTileCount) throw DataError("delta_table: expected 12 tiles");
  DeltaTable table;
  for (int t = 0; t < kTileCount; ++t) {
    for (const auto& row : tiles[t]) {
      const auto v = row.get<std::array<double, 8>>();
      DeltaEntry e;
      e.delta = {v[0], v[1], v[2], v[3]};
      e.config = KnobConfig{v[4], v[5], v[6], v[7]};
      table.tiles[t].push_back(e);
    }
  }
  return table;
}

DeltaGrids DeltaGrids::anchored(double step) { return anchored({step, step, step, step}); }

DeltaGrids DeltaGrids::anchored(const std::array<double, 4>& steps) {
  DeltaGrids g;
  for (Knob k : kAllKnobs) {
    const double step = steps[static_cast<int>(k)];
    if (!(step > 0.0)) throw std::invalid_argument("delta grid step must be positive");
    const KnobRange r = knob_range(k);
    std::vector<double> v = {r.lo, r.hi};
    for (double x = 1.0; x >= r.lo - 1e-9; x -= step) v.push_back(std::round(x * 1e9) / 1e9);
    for (double x = 1.0 + step; x <= r.hi + 1e-9; x += step) v.push_back(std::round(x * 1e9) / 1e9);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
    g.values[static_cast<int>(k)] = std::move(v);
  }
  return g;
}

std::size_t DeltaGrids::product_size() const {
  std::size_t n = 1;
  for (const auto& v : values) n *= v.size();
  return n;
}

std::vector<KnobConfig> DeltaGrids::enumerate() const {
  std::vector<KnobConfig> out;
  out.reserve(product_size());
  for (double b : values[0])
    for (double c : values[1])
      for (double s : values[2])
        for (double sh : values[3]) out.push_back({b, c, s, sh});
  return out;
}

std::array<double, 4> feature_ratio(const FeatureTuple& num, const FeatureTuple& den) {
  std::array<double, 4> r{};
  for (std::size_t k = 0; k < 4; ++k) r[k] = std::max(num[k], kRatioEpsilon) / std::max(den[k], kRatioEpsilon);
  return r;
}

DeltaTable build_delta_table(const FrameCorpus& corpus, const DeltaGrids& grids, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ImageBuffer> samples;
  for (int interval : corpus.intervals_present()) {
    const auto frames = corpus.frames_in(interval);
    std::uniform_int_distribution<std::size_t> pick(0, frames.size() - 1);
    const FrameRecord* rec = frames[pick(rng)];
    try {
      samples.push_back(FrameCorpus::load(*rec));
    } catch (const std::exception& e) {
      spdlog::warn("skipping unreadable frame {}: {}", rec->path.string(), e.what());
    }
  }
  if (samples.empty()) throw DataError("delta table: corpus has no readable frames");
  return build_delta_table(samples, grids);
}

namespace {

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DeltaTable build_delta_table(std::span<const ImageBuffer> samples, const DeltaGrids& grids) {
  if (samples.empty()) throw std::invalid_argument("delta table needs at least one sample frame");
  for (const auto& v : grids.values) {
    if (v.empty()) throw std::invalid_argument("delta table grids must be non-empty");
  }
  const std::vector<KnobConfig> configs = grids.enumerate();
  const std::size_t n_cfg = configs.size();
  const std::size_t n_frames = samples.size();

  // ratios[(cfg * tiles + tile) * frames + frame]
  std::vector<std::array<double, 4>> ratios(n_cfg * kTileCount * n_frames);

  parallel_for(n_frames, [&](std::size_t f) {
    const ImageBuffer& frame = samples[f];
    const auto original = tile_features(frame);
    std::size_t cfg = 0;
    // Knobs compose in application order, so each prefix is rendered once.
    for (double b : grids.values[0]) {
      const ImageBuffer ib = apply_knob(frame, Knob::Brightness, b);
      for (double c : grids.values[1]) {
        const ImageBuffer ic = apply_knob(ib, Knob::Contrast, c);
        for (double s : grids.values[2]) {
          const ImageBuffer is = apply_knob(ic, Knob::ColorSaturation, s);
          for (double sh : grids.values[3]) {
            const auto rendered = tile_features(apply_knob(is, Knob::Sharpness, sh));
            for (int t = 0; t < kTileCount; ++t) {
              ratios[(cfg * kTileCount + t) * n_frames + f] = feature_ratio(rendered[t], original[t]);
            }
            ++cfg;
          }
        }
      }
    }
  });

  DeltaTable table;
  std::vector<double> column(n_frames);
  for (int t = 0; t < kTileCount; ++t) {
    auto& entries = table.tiles[t];
    entries.reserve(n_cfg);
    for (std::size_t cfg = 0; cfg < n_cfg; ++cfg) {
      DeltaEntry e;
      e.config = configs[cfg];
      const std::size_t base = (cfg * kTileCount + t) * n_frames;
      for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t f = 0; f < n_frames; ++f) column[f] = ratios[base + f][k];
        e.delta[k] = median_of(column);
      }
      entries.push_back(e);
    }
  }
  return table;
}

const DeltaEntry& nearest_delta(const std::vector<DeltaEntry>& entries, const std::array<double, 4>& delta,
                                double* distance) {
  if (entries.empty()) throw DataError("delta table tile has no entries");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) d += std::abs(entries[i].delta[k] - delta[k]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (distance != nullptr) *distance = best_d;
  return entries[best];
}

RenderResult render_to_time(const ImageBuffer& frame, TimeOfDay t1, TimeOfDay t2, const VcTable& vc,
                            const DeltaTable& dt) {
  frame.validate();
  vc.at(t1.interval());
  const VcTable::Slot& target = vc.at(t2.interval());
  const auto observed = tile_features(frame);

  RenderResult out;
  for (int t = 0; t < kTileCount; ++t) {
    const auto delta = feature_ratio(target.tiles[t], observed[t]);
    out.tile_configs[t] = nearest_delta(dt.tiles[t], delta, &out.match_l1[t]).config;
  }
  for (Knob k : kAllKnobs) {
    std::vector<double> column;
    column.reserve(kTileCount);
    for (const KnobConfig& c : out.tile_configs) column.push_back(c[k]);
    out.config[k] = median_of(column);
  }
  const double worst = *std::max_element(out.match_l1.begin(), out.match_l1.end());
  spdlog::debug("vc render {} -> {}: config {} worst tile L1 {:.3f}", t1.to_string(), t2.to_string(),
                to_string(out.config), worst);
  out.frame = apply_config(frame, out.config);
  out.frame.tag = frame.tag;
  return out;
}

}  // namespace camknob
