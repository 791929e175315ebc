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
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "camknob/estimator.hpp"
#include "camknob/image.hpp"
#include "camknob/metrics.hpp"

namespace camknob {

/// NoOp comes first so that argmax ties resolve to doing nothing.
enum class Action : std::uint8_t {
  NoOp = 0,
  IncBrightness,
  DecBrightness,
  IncContrast,
  DecContrast,
  IncColorSaturation,
  DecColorSaturation,
  IncSharpness,
  DecSharpness,
};

inline constexpr std::size_t kActionCount = 9;

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);
Action action_from_index(std::size_t i);
inline std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }

/// Knob touched by the action, or nullopt for NoOp.
std::optional<Knob> action_knob(Action a);
/// +1 for increase, -1 for decrease, 0 for NoOp.
int action_direction(Action a);

/// Increase <-> decrease on the same knob; NoOp stays NoOp.
Action revert(Action a);

/// Knob levels (4) followed by feature bins (4).
using StateKey = std::array<int, 8>;

std::string state_key_to_string(const StateKey& s);
StateKey state_key_from_string(const std::string& text);

/// Tabular action values, 0 for unseen pairs.
class QTable {
 public:
  double get(const StateKey& s, Action a) const;
  void set(const StateKey& s, Action a, double value);

  /// First action with the maximal value among `allowed` (NoOp on ties).
  Action argmax(const StateKey& s, const std::array<bool, kActionCount>& allowed) const;

  std::size_t size() const { return rows_.size(); }
  bool operator==(const QTable&) const = default;

  /// {"l0,l1,...,l7": {"noop": v, "inc_brightness": v, ...}}
  nlohmann::json to_json() const;
  static QTable from_json(const nlohmann::json& doc);

 private:
  std::map<StateKey, std::array<double, kActionCount>> rows_;
};

/// Learning parameters.
///
/// CAUTION, inverted exploration convention: a uniformly random action is
/// taken when a U[0,1) draw is >= epsilon. epsilon = 1 never explores,
/// epsilon = 0 always does. Lower epsilon means more exploration.
struct AgentConfig {
  double alpha = 0.5;
  double gamma = 0.9;
  double epsilon = 0.9;
  /// Factor change per increase/decrease; defaults to a tenth of each range.
  std::array<double, 4> steps = default_steps();
  std::uint64_t seed = 1;
  /// Actions the policy may emit. Must contain NoOp and be closed under revert.
  std::array<bool, kActionCount> allowed = all_actions();

  static std::array<double, 4> default_steps();
  static std::array<bool, kActionCount> all_actions();
  static std::array<bool, kActionCount> noop_only();

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Q(s,a) <- Q(s,a) + alpha * (r + gamma * Q(s',a') - Q(s,a)); returns the new Q(s,a).
/// Throws std::invalid_argument for a non-finite reward.
double q_update(QTable& q, const StateKey& s, Action a, double r, const StateKey& s_next, Action a_next,
                const AgentConfig& cfg);

/// Action policy:
///   draw >= epsilon           -> uniformly random allowed action
///   r_prev < 0                -> revert(a_prev)
///   r_prev > Q(s, argmax)     -> a_prev again
///   otherwise                 -> argmax
Action choose_action(const QTable& q, const StateKey& s, Action a_prev, double r_prev, const AgentConfig& cfg,
                     std::mt19937_64& rng);

/// Applies the action to a configuration, clamping the moved knob to its range.
KnobConfig perform(const KnobConfig& knobs, Action a, const std::array<double, 4>& steps);

/// Equal-width bins per feature over a fitted [lo, hi] span. Values outside
/// the span fall into the end bins.
struct FeatureBins {
  std::array<double, 4> lo{};
  std::array<double, 4> hi{};
  int bins = 4;

  static FeatureBins fit(std::span<const FeatureTuple> observed, int bins = 4);
  int bin(std::size_t feature, double value) const;
};

/// Maps (knobs, measured features) to a StateKey.
class StateEncoder {
 public:
  StateEncoder(FeatureBins bins, std::array<double, 4> steps);

  StateKey encode(const KnobConfig& knobs, const FeatureTuple& features) const;
  /// round((v - lo) / step) per knob.
  int knob_level(Knob k, double value) const;
  const FeatureBins& bins() const { return bins_; }

 private:
  FeatureBins bins_;
  std::array<double, 4> steps_;
};

/// A camera pipeline the agent can steer.
class TunableEnv {
 public:
  virtual ~TunableEnv() = default;
  virtual KnobConfig knobs() const = 0;
  virtual void set_knobs(const KnobConfig& knobs) = 0;
  /// Frame at the current simulated time with the current knobs.
  virtual ImageBuffer produce_frame() = 0;
  /// Moves simulated time forward by one tick.
  virtual void advance() {}
};

struct TraceRow {
  int step = 0;
  StateKey state{};
  Action action = Action::NoOp;
  KnobConfig knobs;              // after the action
  double reward = 0.0;           // quality minus the previous step's quality
  double reward_pre_action = 0.0;  // quality minus this tick's pre-action quality
  double q_value = 0.0;          // Q(s, a) after the update
  double q_delta = 0.0;
  double quality = 0.0;
  bool estimator_unavailable = false;
};

/// Agent state carried between steps, so that episodes can be chained.
struct SarsaAgent {
  QTable q;
  AgentConfig cfg;
  std::mt19937_64 rng;

  explicit SarsaAgent(AgentConfig config);
};

struct EpisodeOptions {
  int steps = 100;
  /// Also estimate each tick's frame before acting, for reward_pre_action.
  bool record_pre_action = true;
};

/// observe s, choose a; then per step: perform a, estimate, reward, observe
/// s', choose a', update Q(s,a), shift. Each step ends with env.advance().
/// Steps whose estimate is unavailable get zero reward and are flagged.
std::vector<TraceRow> run_episode(TunableEnv& env, QualityEstimator& estimator, SarsaAgent& agent,
                                  const StateEncoder& encoder, const EpisodeOptions& options);

/// Columns: step,state,action,reward,q_value,quality,reward_pre_action,q_delta,
/// brightness,contrast,color_saturation,sharpness,estimator_unavailable
void write_trace_csv(std::span<const TraceRow> trace, const std::filesystem::path& path);
std::string trace_csv_header();

}  // namespace camknob
