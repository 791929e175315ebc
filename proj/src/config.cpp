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

#include "camknob/config.hpp"

#include <fstream>
#include <sstream>

#include "camknob/errors.hpp"

namespace camknob {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T, typename F>
T convert(const std::string& key, const std::string& text, F&& fn) {
  std::size_t used = 0;
  try {
    T v = fn(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::set<std::string>& accepted_keys) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!accepted_keys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    if (cfg.values_.contains(key)) throw ConfigError("duplicate config key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path, const std::set<std::string>& accepted_keys) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), accepted_keys);
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return convert<double>(key, it->second, [](const std::string& s, std::size_t* n) { return std::stod(s, n); });
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return convert<int>(key, it->second, [](const std::string& s, std::size_t* n) { return std::stoi(s, n); });
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (!it->second.empty() && it->second[0] == '-') throw ConfigError("config key '" + key + "' must be >= 0");
  return convert<std::uint64_t>(key, it->second,
                                [](const std::string& s, std::size_t* n) { return std::stoull(s, n); });
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::vector<double> RunConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string part;
  while (std::getline(in, part, ',')) {
    out.push_back(convert<double>(key, trim(part), [](const std::string& s, std::size_t* n) { return std::stod(s, n); }));
  }
  return out;
}

KnobConfig RunConfig::get_config(const std::string& key, const KnobConfig& fallback) const {
  if (!has(key)) return fallback;
  const auto v = get_doubles(key, {});
  if (v.size() != 4) throw ConfigError("config key '" + key + "' needs 4 comma separated factors");
  return KnobConfig::from_array({v[0], v[1], v[2], v[3]});
}

std::filesystem::path RunConfig::get_existing_path(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) throw ConfigError("missing required path '" + key + "'");
  std::filesystem::path p(it->second);
  if (!std::filesystem::exists(p)) throw ConfigError(key + ": path does not exist: " + p.string());
  return p;
}

const std::map<std::string, std::string>& documented_config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"seed", "RNG seed for every stochastic step"},
      {"out", "output directory"},
      {"corpus", "directory of frame_HHMMSS_seq.png|ppm frames"},
      {"scene", "generated scene directory (scene.json, gt.jsonl)"},
      {"vc_table", "VC table JSON"},
      {"delta_table", "delta table JSON"},
      {"delta_step", "grid step of the delta table around 1.0, all knobs"},
      {"delta_steps", "per-knob delta grid steps, 4 comma separated values"},
      {"alpha", "SARSA learning rate"},
      {"gamma", "SARSA discount factor"},
      {"epsilon", "policy threshold; a random action is taken when U[0,1) >= epsilon"},
      {"knob_steps", "per-knob action step sizes, 4 comma separated values"},
      {"training_passes", "simulated days of training before the evaluation day"},
      {"tick_frames", "frames per agent action"},
      {"estimator", "oracle | proxy | external"},
      {"estimator_cmd", "external estimator command line"},
      {"estimator_timeout_ms", "external estimator reply timeout"},
      {"proxy_weights", "proxy estimator feature weights, 4 comma separated values"},
      {"response_peak", "planted detector optimum as feature ratios, 4 comma separated values"},
      {"response_width", "width of the planted detector response"},
      {"upper_bound_levels", "levels per knob of the per-interval exhaustive sweep"},
      {"noop_only", "restrict the agent to the no-op action (A/A run)"},
      {"scene_width", "generated frame width"},
      {"scene_height", "generated frame height"},
      {"scene_interval_stride", "generate every n-th 15 minute interval"},
      {"scene_frames", "frames per generated interval"},
      {"scene_noise", "sensor noise standard deviation"},
      {"scene_objects", "objects per generated scene"},
      {"scene_profile", "day | flat"},
      {"scene_light_min", "darkest light level relative to midday"},
  };
  return keys;
}

std::set<std::string> config_key_names() {
  std::set<std::string> names;
  for (const auto& [k, v] : documented_config_keys()) names.insert(k);
  return names;
}

}  // namespace camknob
