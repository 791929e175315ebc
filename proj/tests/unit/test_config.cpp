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

#include <doctest.h>

#include <fstream>

#include "camknob/config.hpp"
#include "camknob/errors.hpp"
#include "support.hpp"

using namespace camknob;

namespace {

const std::set<std::string> kKeys = {"seed", "alpha", "out", "corpus", "noop_only", "knob_steps", "response_peak"};

}  // namespace

TEST_CASE("key = value lines parse with comments, blanks and surrounding spaces") {
  const RunConfig cfg = RunConfig::parse(
      "# run settings\n"
      "\n"
      "  seed = 42  \n"
      "alpha=0.25\r\n"
      "\t# indented comment\n"
      "out = /tmp/some dir\n",
      kKeys);
  CHECK(cfg.values().size() == 3);
  CHECK(cfg.get_int("seed", 0) == 42);
  CHECK(cfg.get_u64("seed", 0) == 42u);
  CHECK(cfg.get_double("alpha", 0.0) == 0.25);
  CHECK(cfg.get_string("out", "") == "/tmp/some dir");
  CHECK(cfg.get_string("corpus", "fallback") == "fallback");
  CHECK(cfg.get_double("corpus", 1.5) == 1.5);
}

TEST_CASE("malformed files are configuration errors") {
  CHECK_THROWS_AS(RunConfig::parse("learning_rate = 0.5\n", kKeys), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("seed = 1\nseed = 2\n", kKeys), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("seed 1\n", kKeys), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse(" = 1\n", kKeys), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.conf", kKeys), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(camknob::testing::data_dir() / "bad.conf", config_key_names()), ConfigError);
}

TEST_CASE("numbers must parse completely") {
  RunConfig cfg;
  cfg.set("alpha", "0.5x");
  CHECK_THROWS_AS(cfg.get_double("alpha", 0.0), ConfigError);
  cfg.set("alpha", "");
  CHECK_THROWS_AS(cfg.get_double("alpha", 0.0), ConfigError);
  cfg.set("seed", "12.5");
  CHECK_THROWS_AS(cfg.get_int("seed", 0), ConfigError);
  cfg.set("seed", "-3");
  CHECK(cfg.get_int("seed", 0) == -3);
  CHECK_THROWS_AS(cfg.get_u64("seed", 0), ConfigError);
  cfg.set("seed", "99999999999999999999999");
  CHECK_THROWS_AS(cfg.get_u64("seed", 0), ConfigError);
}

TEST_CASE("booleans accept true/false, 1/0 and yes/no only") {
  RunConfig cfg;
  for (const char* t : {"true", "1", "yes"}) {
    cfg.set("noop_only", t);
    CHECK(cfg.get_bool("noop_only", false));
  }
  for (const char* f : {"false", "0", "no"}) {
    cfg.set("noop_only", f);
    CHECK_FALSE(cfg.get_bool("noop_only", true));
  }
  cfg.set("noop_only", "maybe");
  CHECK_THROWS_AS(cfg.get_bool("noop_only", false), ConfigError);
  CHECK(RunConfig{}.get_bool("noop_only", true));
}

TEST_CASE("lists and knob configurations") {
  RunConfig cfg;
  cfg.set("knob_steps", "0.1, 0.3,0.15 , 0.2");
  CHECK(cfg.get_doubles("knob_steps", {}) == std::vector<double>{0.1, 0.3, 0.15, 0.2});
  cfg.set("response_peak", "1.25,1.35,1.2,1.2");
  CHECK(cfg.get_config("response_peak", {}) == KnobConfig{1.25, 1.35, 1.2, 1.2});
  CHECK(RunConfig{}.get_config("response_peak", {2, 2, 2, 2}) == KnobConfig{2, 2, 2, 2});
  cfg.set("response_peak", "1,1,1");
  CHECK_THROWS_AS(cfg.get_config("response_peak", {}), ConfigError);
  cfg.set("knob_steps", "0.1,abc");
  CHECK_THROWS_AS(cfg.get_doubles("knob_steps", {}), ConfigError);
}

TEST_CASE("required paths must exist") {
  const auto dir = camknob::testing::scratch_dir("config_paths");
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.get_existing_path("corpus"), ConfigError);
  cfg.set("corpus", "");
  CHECK_THROWS_AS(cfg.get_existing_path("corpus"), ConfigError);
  cfg.set("corpus", (dir / "missing").string());
  CHECK_THROWS_AS(cfg.get_existing_path("corpus"), ConfigError);
  cfg.set("corpus", dir.string());
  CHECK(cfg.get_existing_path("corpus") == dir);
}

TEST_CASE("documented keys are exactly the accepted keys and round trip through a file") {
  const auto& docs = documented_config_keys();
  const auto names = config_key_names();
  CHECK(names.size() == docs.size());
  for (const auto& [k, d] : docs) {
    CHECK(names.contains(k));
    CHECK_FALSE(d.empty());
  }

  const auto path = camknob::testing::scratch_dir("config_file") / "run.conf";
  {
    std::ofstream out(path);
    out << "# every documented key\n";
    for (const auto& [k, d] : docs) out << k << " = v_" << k << "\n";
  }
  const RunConfig cfg = RunConfig::load(path, names);
  CHECK(cfg.values().size() == docs.size());
  for (const auto& [k, d] : docs) CHECK(cfg.get_string(k, "") == "v_" + k);
}
