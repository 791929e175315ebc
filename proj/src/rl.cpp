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

#include "camknob/rl.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "camknob/errors.hpp"

namespace camknob {

namespace {

constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "noop",           "inc_brightness",       "dec_brightness",       "inc_contrast", "dec_contrast",
    "inc_saturation", "dec_saturation",       "inc_sharpness",        "dec_sharpness"};

}  // namespace

std::string_view action_name(Action a) { return kActionNames.at(action_index(a)); }

std::optional<Action> parse_action(std::string_view name) {
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (kActionNames[i] == name) return action_from_index(i);
  }
  return std::nullopt;
}

Action action_from_index(std::size_t i) {
  if (i >= kActionCount) throw std::out_of_range("action index");
  return static_cast<Action>(i);
}

std::optional<Knob> action_knob(Action a) {
  if (a == Action::NoOp) return std::nullopt;
  return static_cast<Knob>((action_index(a) - 1) / 2);
}

int action_direction(Action a) {
  if (a == Action::NoOp) return 0;
  return (action_index(a) - 1) % 2 == 0 ? 1 : -1;
}

Action revert(Action a) {
  if (a == Action::NoOp) return a;
  const std::size_t i = action_index(a);
  return action_from_index(action_direction(a) > 0 ? i + 1 : i - 1);
}

std::string state_key_to_string(const StateKey& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out;
}

StateKey state_key_from_string(const std::string& text) {
  StateKey s{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= s.size()) throw DataError("state key has more than 8 fields: " + text);
    std::size_t used = 0;
    try {
      s[i] = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw DataError("bad state key field '" + part + "'");
    ++i;
  }
  if (i != s.size()) throw DataError("state key needs 8 fields: " + text);
  return s;
}

double QTable::get(const StateKey& s, Action a) const {
  const auto it = rows_.find(s);
  return it == rows_.end() ? 0.0 : it->second[action_index(a)];
}

void QTable::set(const StateKey& s, Action a, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("Q values must be finite");
  auto [it, inserted] = rows_.try_emplace(s);
  if (inserted) it->second.fill(0.0);
  it->second[action_index(a)] = value;
}

Action QTable::argmax(const StateKey& s, const std::array<bool, kActionCount>& allowed) const {
  std::optional<std::size_t> best;
  double best_v = 0.0;
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (!allowed[i]) continue;
    const double v = get(s, action_from_index(i));
    if (!best || v > best_v) {
      best = i;
      best_v = v;
    }
  }
  return best ? action_from_index(*best) : Action::NoOp;
}

nlohmann::json QTable::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [s, row] : rows_) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < kActionCount; ++i) r[std::string(kActionNames[i])] = row[i];
    doc[state_key_to_string(s)] = std::move(r);
  }
  return doc;
}

QTable QTable::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw DataError("Q-table must be a JSON object");
  QTable q;
  for (const auto& [key, row] : doc.items()) {
    const StateKey s = state_key_from_string(key);
    if (!row.is_object()) throw DataError("Q-table row must be an object");
    for (const auto& [name, value] : row.items()) {
      const auto a = parse_action(name);
      if (!a) throw DataError("unknown action '" + name + "' in Q-table");
      if (!value.is_number()) throw DataError("Q value must be a number");
      q.set(s, *a, value.get<double>());
    }
  }
  return q;
}

std::array<double, 4> AgentConfig::default_steps() {
  std::array<double, 4> s{};
  for (Knob k : kAllKnobs) s[static_cast<std::size_t>(k)] = knob_range(k).width() / 10.0;
  return s;
}

std::array<bool, kActionCount> AgentConfig::all_actions() {
  std::array<bool, kActionCount> a{};
  a.fill(true);
  return a;
}

std::array<bool, kActionCount> AgentConfig::noop_only() {
  std::array<bool, kActionCount> a{};
  a[action_index(Action::NoOp)] = true;
  return a;
}

void AgentConfig::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  };
  unit(alpha, "alpha");
  unit(gamma, "gamma");
  unit(epsilon, "epsilon");
  for (double s : steps) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("knob steps must be positive");
  }
  if (!allowed[action_index(Action::NoOp)]) throw std::invalid_argument("the no-op action must be allowed");
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (allowed[i] && !allowed[action_index(revert(action_from_index(i)))]) {
      throw std::invalid_argument("allowed actions must be closed under revert");
    }
  }
}

double q_update(QTable& q, const StateKey& s, Action a, double r, const StateKey& s_next, Action a_next,
                const AgentConfig& cfg) {
  if (!std::isfinite(r)) throw std::invalid_argument("reward must be finite");
  const double old = q.get(s, a);
  const double updated = old + cfg.alpha * (r + cfg.gamma * q.get(s_next, a_next) - old);
  q.set(s, a, updated);
  return updated;
}

Action choose_action(const QTable& q, const StateKey& s, Action a_prev, double r_prev, const AgentConfig& cfg,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= cfg.epsilon) {
    std::vector<Action> pool;
    for (std::size_t i = 0; i < kActionCount; ++i) {
      if (cfg.allowed[i]) pool.push_back(action_from_index(i));
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
  }
  if (r_prev < 0.0) return revert(a_prev);
  const Action best = q.argmax(s, cfg.allowed);
  if (r_prev > q.get(s, best)) return a_prev;
  return best;
}

KnobConfig perform(const KnobConfig& knobs, Action a, const std::array<double, 4>& steps) {
  KnobConfig out = knobs;
  const auto k = action_knob(a);
  if (!k) return out;
  const KnobRange r = knob_range(*k);
  const double v = knobs[*k] + action_direction(a) * steps[static_cast<std::size_t>(*k)];
  // Snap away accumulated floating point error so that lattice points repeat exactly.
  out[*k] = std::clamp(std::round(v * 1e9) / 1e9, r.lo, r.hi);
  return out;
}

FeatureBins FeatureBins::fit(std::span<const FeatureTuple> observed, int bins) {
  if (observed.empty()) throw std::invalid_argument("cannot fit feature bins to no observations");
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  FeatureBins fb;
  fb.bins = bins;
  for (std::size_t i = 0; i < 4; ++i) {
    fb.lo[i] = fb.hi[i] = observed[0][i];
    for (const FeatureTuple& f : observed) {
      fb.lo[i] = std::min(fb.lo[i], f[i]);
      fb.hi[i] = std::max(fb.hi[i], f[i]);
    }
  }
  return fb;
}

int FeatureBins::bin(std::size_t feature, double value) const {
  const double span = hi[feature] - lo[feature];
  if (!(span > 0.0)) return 0;
  const int b = static_cast<int>(std::floor((value - lo[feature]) / span * bins));
  return std::clamp(b, 0, bins - 1);
}

StateEncoder::StateEncoder(FeatureBins bins, std::array<double, 4> steps) : bins_(bins), steps_(steps) {
  for (double s : steps_) {
    if (!(s > 0.0)) throw std::invalid_argument("knob steps must be positive");
  }
}

int StateEncoder::knob_level(Knob k, double value) const {
  return static_cast<int>(std::lround((value - knob_range(k).lo) / steps_[static_cast<std::size_t>(k)]));
}

StateKey StateEncoder::encode(const KnobConfig& knobs, const FeatureTuple& features) const {
  StateKey s{};
  for (Knob k : kAllKnobs) {
    const auto i = static_cast<std::size_t>(k);
    s[i] = knob_level(k, knobs[k]);
    s[4 + i] = bins_.bin(i, features[i]);
  }
  return s;
}

SarsaAgent::SarsaAgent(AgentConfig config) : cfg(config), rng(config.seed) { cfg.validate(); }

namespace {

struct Observation {
  FeatureTuple features;
  std::optional<double> quality;
};

Observation observe(TunableEnv& env, QualityEstimator& estimator) {
  const ImageBuffer frame = env.produce_frame();
  Observation o{extract_features(frame), std::nullopt};
  try {
    o.quality = estimator.estimate(frame).value;
  } catch (const EstimatorUnavailable& e) {
    spdlog::warn("quality estimate unavailable: {}", e.what());
  }
  return o;
}

}  // namespace

std::vector<TraceRow> run_episode(TunableEnv& env, QualityEstimator& estimator, SarsaAgent& agent,
                                  const StateEncoder& encoder, const EpisodeOptions& options) {
  if (options.steps < 0) throw std::invalid_argument("episode steps must be >= 0");
  std::vector<TraceRow> trace;
  trace.reserve(static_cast<std::size_t>(options.steps));

  Observation obs = observe(env, estimator);
  double prev_quality = obs.quality.value_or(0.0);
  StateKey s = encoder.encode(env.knobs(), obs.features);
  Action a = choose_action(agent.q, s, Action::NoOp, 0.0, agent.cfg, agent.rng);

  for (int step = 0; step < options.steps; ++step) {
    TraceRow row;
    row.step = step;
    row.state = s;
    row.action = a;

    std::optional<double> before;
    if (options.record_pre_action && step > 0) before = observe(env, estimator).quality;

    env.set_knobs(perform(env.knobs(), a, agent.cfg.steps));
    row.knobs = env.knobs();
    const Observation next = observe(env, estimator);
    double r = 0.0;
    if (next.quality) {
      row.quality = *next.quality;
      r = *next.quality - prev_quality;
      row.reward_pre_action = *next.quality - before.value_or(prev_quality);
      prev_quality = *next.quality;
    } else {
      row.quality = prev_quality;
      row.estimator_unavailable = true;
    }
    row.reward = r;

    const StateKey s_next = encoder.encode(env.knobs(), next.features);
    const Action a_next = choose_action(agent.q, s_next, a, r, agent.cfg, agent.rng);
    const double old = agent.q.get(s, a);
    row.q_value = q_update(agent.q, s, a, r, s_next, a_next, agent.cfg);
    row.q_delta = row.q_value - old;
    trace.push_back(row);

    s = s_next;
    a = a_next;
    env.advance();
  }
  return trace;
}

std::string trace_csv_header() {
  return "step,state,action,reward,q_value,quality,reward_pre_action,q_delta,"
         "brightness,contrast,color_saturation,sharpness,estimator_unavailable";
}

void write_trace_csv(std::span<const TraceRow> trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace " + path.string());
  out.precision(10);
  out << trace_csv_header() << '\n';
  for (const TraceRow& t : trace) {
    std::string state = state_key_to_string(t.state);
    std::replace(state.begin(), state.end(), ',', ' ');
    out << t.step << ',' << state << ',' << action_name(t.action) << ',' << t.reward << ',' << t.q_value << ','
        << t.quality << ',' << t.reward_pre_action << ',' << t.q_delta << ',' << t.knobs.brightness << ','
        << t.knobs.contrast << ',' << t.knobs.color_saturation << ',' << t.knobs.sharpness << ','
        << (t.estimator_unavailable ? 1 : 0) << '\n';
  }
}

}  // namespace camknob
