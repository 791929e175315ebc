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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "camknob/errors.hpp"
#include "camknob/image.hpp"
#include "camknob/metrics.hpp"

namespace camknob {

inline constexpr int kIntervalSeconds = 15 * 60;
inline constexpr int kIntervalsPerDay = 24 * 60 * 60 / kIntervalSeconds;  // 96
inline constexpr int kTableSchemaVersion = 1;

struct TimeOfDay {
  int seconds = 0;  // since midnight, [0, 86400)

  /// Accepts "HH:MM", "HH:MM:SS" and "HHMMSS".
  static TimeOfDay parse(const std::string& text);
  static TimeOfDay of_interval(int interval) { return {interval * kIntervalSeconds}; }
  int interval() const { return seconds / kIntervalSeconds; }
  std::string to_string() const;  // HH:MM:SS
};

struct FrameRecord {
  std::filesystem::path path;
  std::string id;  // file stem, e.g. frame_120000_0003
  int seconds = 0;
  int seq = 0;
  int interval() const { return seconds / kIntervalSeconds; }
};

/// Parses `frame_<HHMMSS>_<seq>.<png|ppm>`.
std::optional<FrameRecord> parse_frame_name(const std::filesystem::path& path);

/// Directory of timestamped frames grouped into 15-minute intervals.
class FrameCorpus {
 public:
  FrameCorpus() = default;
  explicit FrameCorpus(std::vector<FrameRecord> records);

  /// Scans a directory; files that do not follow the naming scheme are ignored.
  static FrameCorpus scan(const std::filesystem::path& dir);

  const std::vector<FrameRecord>& records() const { return records_; }
  std::vector<const FrameRecord*> frames_in(int interval) const;
  std::vector<int> intervals_present() const;
  bool empty() const { return records_.empty(); }

  /// Loads the frame; its tag is set to the record id.
  static ImageBuffer load(const FrameRecord& record);

 private:
  std::vector<FrameRecord> records_;  // sorted by (seconds, seq)
};

/// Per-interval, per-tile mean feature tuples. Absent slots are missing.
struct VcTable {
  struct Slot {
    std::array<FeatureTuple, kTileCount> tiles{};
    int frames = 0;
  };

  std::array<std::optional<Slot>, kIntervalsPerDay> slots{};
  int skipped_frames = 0;

  bool has(int interval) const;
  /// Throws DataError if the interval is missing.
  const Slot& at(int interval) const;
  std::vector<int> present() const;

  /// Unweighted mean over the interval's 12 tile entries.
  FeatureTuple mean_features(int interval) const;

  nlohmann::json to_json() const;
  static VcTable from_json(const nlohmann::json& doc);
};

/// Averages per-tile features over every frame of every interval.
VcTable build_vc_table(const FrameCorpus& corpus);

/// Same, over frames already in memory, grouped by interval.
VcTable build_vc_table(std::span<const std::pair<int, ImageBuffer>> frames);

struct DeltaEntry {
  std::array<double, 4> delta{};  // rendered / original, per feature
  KnobConfig config;
};

/// Per-tile delta -> configuration maps, entries in lexicographic config order.
struct DeltaTable {
  std::array<std::vector<DeltaEntry>, kTileCount> tiles{};

  std::size_t configs_per_tile() const { return tiles[0].size(); }
  nlohmann::json to_json() const;
  static DeltaTable from_json(const nlohmann::json& doc);
};

/// Factor grids per knob for delta-table enumeration.
struct DeltaGrids {
  std::array<std::vector<double>, 4> values;

  /// Anchored at 1.0 and stepping outwards by `step`, plus the range bounds.
  static DeltaGrids anchored(double step = 0.25);
  static DeltaGrids anchored(const std::array<double, 4>& steps);
  std::size_t product_size() const;
  std::vector<KnobConfig> enumerate() const;  // lexicographic order
};

inline constexpr double kRatioEpsilon = 1e-3;

/// Component-wise ratio num / den with both sides clamped to epsilon, so a
/// flat tile staying flat reads as 1 and every ratio is finite and positive.
std::array<double, 4> feature_ratio(const FeatureTuple& num, const FeatureTuple& den);

/// Samples one frame per present interval (seeded) and builds the table.
DeltaTable build_delta_table(const FrameCorpus& corpus, const DeltaGrids& grids, std::uint64_t seed);

/// Builds the table from the given sample frames: every configuration is
/// rendered on each frame, per-tile feature ratios are taken against the
/// original, and the per-configuration median across frames is stored.
DeltaTable build_delta_table(std::span<const ImageBuffer> samples, const DeltaGrids& grids);

struct RenderResult {
  ImageBuffer frame;
  KnobConfig config;                               // median of the per-tile matches
  std::array<KnobConfig, kTileCount> tile_configs{};
  std::array<double, kTileCount> match_l1{};      // L1 distance of each tile's match
};

/// Re-renders a frame captured at t1 as if captured at t2.
RenderResult render_to_time(const ImageBuffer& frame, TimeOfDay t1, TimeOfDay t2, const VcTable& vc,
                            const DeltaTable& dt);

/// Closest entry under L1; ties resolve to the earliest (lexicographically smallest) config.
const DeltaEntry& nearest_delta(const std::vector<DeltaEntry>& entries, const std::array<double, 4>& delta,
                                double* distance = nullptr);

}  // namespace camknob
