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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "camknob/image.hpp"

namespace camknob {

/// Flat `key = value` run configuration. Blank lines and lines starting with
/// '#' are ignored. Keys outside the accepted set are a ConfigError.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse(const std::string& text, const std::set<std::string>& accepted_keys);
  static RunConfig load(const std::filesystem::path& path, const std::set<std::string>& accepted_keys);

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma separated numbers.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  KnobConfig get_config(const std::string& key, const KnobConfig& fallback) const;

  /// Existing path or ConfigError.
  std::filesystem::path get_existing_path(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Every key the command line tool understands, with a one-line description.
const std::map<std::string, std::string>& documented_config_keys();
std::set<std::string> config_key_names();

}  // namespace camknob
