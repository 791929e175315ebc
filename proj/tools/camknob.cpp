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

// camknob: command line front end.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error,
// 1 anything else. Logs go to stderr; results go to files under --out.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "camknob/abeval.hpp"
#include "camknob/calibration.hpp"
#include "camknob/config.hpp"
#include "camknob/deteval.hpp"
#include "camknob/errors.hpp"
#include "camknob/estimator.hpp"
#include "camknob/http_camera.hpp"
#include "camknob/image_io.hpp"
#include "camknob/rl.hpp"
#include "camknob/scene.hpp"
#include "camknob/transforms.hpp"
#include "camknob/vcam.hpp"

namespace fs = std::filesystem;
using namespace camknob;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

const KnobConfig kDefaultPeak{1.25, 1.35, 1.2, 1.2};
constexpr double kDefaultWidth = 0.5;

/// Flag values given on the command line, keyed like the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::string config_path;
};

void bind(CLI::App* sub, Overrides& ov, const std::string& flag, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&ov, key](const std::string& v) { ov.values[key] = v; }, help);
}

void common_flags(CLI::App* sub, Overrides& ov) {
  bind(sub, ov, "--seed", "seed", "RNG seed");
  bind(sub, ov, "--out", "out", "output directory");
  sub->add_option("--config", ov.config_path, "key = value configuration file");
}

RunConfig resolve(const Overrides& ov) {
  RunConfig cfg;
  if (!ov.config_path.empty()) cfg = RunConfig::load(ov.config_path, config_key_names());
  for (const auto& [k, v] : ov.values) cfg.set(k, v);
  return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
  if (!cfg.has("out")) throw ConfigError("--out is required");
  fs::path out(cfg.get_string("out", ""));
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

DeltaGrids delta_grids(const RunConfig& cfg) {
  if (cfg.has("delta_steps")) {
    const auto s = cfg.get_doubles("delta_steps", {});
    if (s.size() != 4) throw ConfigError("delta_steps needs 4 values");
    for (double v : s) {
      if (!(v > 0.0)) throw ConfigError("delta_steps must be positive");
    }
    return DeltaGrids::anchored({s[0], s[1], s[2], s[3]});
  }
  const double step = cfg.get_double("delta_step", 0.25);
  if (!(step > 0.0)) throw ConfigError("delta_step must be positive");
  return DeltaGrids::anchored(step);
}

FrameCorpus open_corpus(const RunConfig& cfg) {
  const fs::path dir = cfg.get_existing_path("corpus");
  FrameCorpus corpus = FrameCorpus::scan(dir);
  if (corpus.empty()) throw DataError("no frames found in " + dir.string());
  return corpus;
}

struct Tables {
  VcTable vc;
  DeltaTable dt;
};

Tables load_or_build_tables(const RunConfig& cfg, const FrameCorpus& corpus) {
  Tables t;
  if (cfg.has("vc_table")) {
    t.vc = VcTable::from_json(read_json(cfg.get_existing_path("vc_table")));
  } else {
    spdlog::info("building VC table from the corpus");
    t.vc = build_vc_table(corpus);
  }
  if (cfg.has("delta_table")) {
    t.dt = DeltaTable::from_json(read_json(cfg.get_existing_path("delta_table")));
  } else {
    spdlog::info("building delta table from the corpus");
    t.dt = build_delta_table(corpus, delta_grids(cfg), cfg.get_u64("seed", 1));
  }
  return t;
}

QualityResponse response(const RunConfig& cfg) {
  const KnobConfig peak = cfg.get_config("response_peak", kDefaultPeak);
  const double width = cfg.get_double("response_width", kDefaultWidth);
  if (!(width > 0.0)) throw ConfigError("response_width must be positive");
  return peaked_response(peak, width);
}

std::array<double, 4> four(const RunConfig& cfg, const std::string& key, const std::array<double, 4>& fallback) {
  const auto v = cfg.get_doubles(key, {fallback.begin(), fallback.end()});
  if (v.size() != 4) throw ConfigError(key + " needs 4 values");
  return {v[0], v[1], v[2], v[3]};
}

std::unique_ptr<QualityEstimator> make_estimator(const RunConfig& cfg, Detector& detector, const GtOracle& gt,
                                                 const FeatureTuple& reference) {
  const std::string kind = cfg.get_string("estimator", "oracle");
  if (kind == "oracle") return std::make_unique<OracleEstimator>(detector, gt);
  if (kind == "proxy") {
    const KnobConfig peak = cfg.get_config("response_peak", kDefaultPeak);
    FeatureTuple ideal = reference;
    for (Knob k : kAllKnobs) ideal[static_cast<std::size_t>(k)] *= peak[k];
    try {
      return std::make_unique<ProxyEstimator>(ideal, four(cfg, "proxy_weights", {0.25, 0.25, 0.25, 0.25}));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "external") {
    std::istringstream in(cfg.get_string("estimator_cmd", ""));
    std::vector<std::string> argv;
    for (std::string part; in >> part;) argv.push_back(part);
    if (argv.empty()) throw ConfigError("estimator = external needs estimator_cmd");
    const int timeout = cfg.get_int("estimator_timeout_ms", 1000);
    if (timeout <= 0) throw ConfigError("estimator_timeout_ms must be positive");
    return std::make_unique<ExternalEstimator>(argv, std::chrono::milliseconds{timeout});
  }
  throw ConfigError("unknown estimator '" + kind + "' (oracle | proxy | external)");
}

AgentConfig agent_config(const RunConfig& cfg) {
  AgentConfig a;
  a.alpha = cfg.get_double("alpha", a.alpha);
  a.gamma = cfg.get_double("gamma", a.gamma);
  a.epsilon = cfg.get_double("epsilon", a.epsilon);
  a.steps = four(cfg, "knob_steps", a.steps);
  a.seed = cfg.get_u64("seed", a.seed);
  if (cfg.get_bool("noop_only", false)) a.allowed = AgentConfig::noop_only();
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return a;
}

FeatureTuple scene_reference(const fs::path& scene_dir) {
  const auto doc = read_json(scene_dir / "scene.json");
  FeatureTuple f;
  try {
    for (std::size_t i = 0; i < 4; ++i) f[i] = doc.at("reference").at(kFeatureNames[i]).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("scene.json: " + std::string(e.what()));
  }
  return f;
}

// ---------------------------------------------------------------- commands

int cmd_gen_scene(const RunConfig& cfg) {
  SceneSpec spec;
  spec.width = cfg.get_int("scene_width", spec.width);
  spec.height = cfg.get_int("scene_height", spec.height);
  const int stride = cfg.get_int("scene_interval_stride", 8);
  if (stride < 1) throw ConfigError("scene_interval_stride must be >= 1");
  spec.intervals = SceneSpec::every_nth_interval(stride);
  spec.frames_per_interval = cfg.get_int("scene_frames", spec.frames_per_interval);
  spec.noise = cfg.get_double("scene_noise", spec.noise);
  spec.objects = cfg.get_int("scene_objects", spec.objects);
  spec.seed = cfg.get_u64("seed", spec.seed);
  spec.profile.light_min = cfg.get_double("scene_light_min", spec.profile.light_min);
  const std::string shape = cfg.get_string("scene_profile", "day");
  if (shape == "flat") {
    spec.profile.shape = DayProfile::Shape::Flat;
  } else if (shape != "day") {
    throw ConfigError("scene_profile must be day or flat");
  }
  spec.validate();
  generate_scene(spec, out_dir(cfg));
  return kExitOk;
}

int cmd_vc_build(const RunConfig& cfg) {
  const fs::path out = out_dir(cfg);
  const FrameCorpus corpus = open_corpus(cfg);
  const DeltaGrids grids = delta_grids(cfg);
  const VcTable vc = build_vc_table(corpus);
  write_json(vc.to_json(), out / "vc_table.json");
  spdlog::info("VC table: {} intervals, {} frames skipped", vc.present().size(), vc.skipped_frames);
  const DeltaTable dt = build_delta_table(corpus, grids, cfg.get_u64("seed", 1));
  write_json(dt.to_json(), out / "delta_table.json");
  spdlog::info("delta table: {} configurations per tile", dt.configs_per_tile());
  return kExitOk;
}

int cmd_vc_render(const RunConfig& cfg, const std::string& frame_path, const std::string& t1_text,
                  const std::string& t2_text) {
  const fs::path out = out_dir(cfg);
  if (frame_path.empty()) throw ConfigError("--frame is required");
  if (t2_text.empty()) throw ConfigError("--t2 is required");
  if (!fs::exists(frame_path)) throw ConfigError("frame does not exist: " + frame_path);
  TimeOfDay t1;
  TimeOfDay t2;
  try {
    t2 = TimeOfDay::parse(t2_text);
    if (!t1_text.empty()) {
      t1 = TimeOfDay::parse(t1_text);
    } else if (const auto rec = parse_frame_name(frame_path)) {
      t1 = TimeOfDay{rec->seconds};
    } else {
      throw ConfigError("--t1 is required when the frame name carries no timestamp");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const VcTable vc = VcTable::from_json(read_json(cfg.get_existing_path("vc_table")));
  const DeltaTable dt = DeltaTable::from_json(read_json(cfg.get_existing_path("delta_table")));
  const ImageBuffer frame = read_image(frame_path);
  const RenderResult r = render_to_time(frame, t1, t2, vc, dt);
  std::string stamp = t2.to_string();
  std::erase(stamp, ':');
  const fs::path png = out / ("render_" + stamp + ".png");
  write_png(r.frame, png);
  nlohmann::json info;
  info["t1"] = t1.to_string();
  info["t2"] = t2.to_string();
  info["config"] = r.config.as_array();
  info["max_match_l1"] = *std::max_element(r.match_l1.begin(), r.match_l1.end());
  write_json(info, out / ("render_" + stamp + ".json"));
  spdlog::info("rendered {} -> {} with {}", t1.to_string(), t2.to_string(), to_string(r.config));
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& image_path, const std::string& grid_name) {
  const fs::path out = out_dir(cfg);
  if (image_path.empty()) throw ConfigError("--image is required");
  if (!fs::exists(image_path)) throw ConfigError("image does not exist: " + image_path);
  int levels = 0;
  if (grid_name == "coarse") {
    levels = 3;
  } else if (grid_name == "fine") {
    levels = 5;
  } else {
    try {
      levels = std::stoi(grid_name);
    } catch (const std::exception&) {
      throw ConfigError("--grid must be coarse, fine or a level count");
    }
    if (levels < 2 || levels > 11) throw ConfigError("--grid level count must lie in [2, 11]");
  }
  const fs::path scene_dir = cfg.get_existing_path("scene");
  const GtOracle gt = load_scene_oracle(scene_dir);
  SyntheticDetector detector(gt, response(cfg));
  const ImageBuffer img = read_image(image_path);
  const auto scene = gt(img.tag);
  if (!scene) throw DataError("no ground truth for " + img.tag);
  const auto configs = config_grid(levels);
  const SweepResult result = find_best_config(img, scene->boxes, detector, configs);

  std::ofstream csv(out / "sweep.csv");
  if (!csv) throw DataError("cannot write sweep.csv");
  csv.precision(10);
  csv << "rank,brightness,contrast,color_saturation,sharpness,map,mean_tp_iou,tp,fp,fn\n";
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    const auto& r = result.ranking[i];
    csv << i + 1;
    for (double v : r.config.as_array()) csv << ',' << v;
    csv << ',' << r.result.map << ',' << r.result.mean_tp_iou << ',' << r.result.tp << ',' << r.result.fp << ','
        << r.result.fn << '\n';
  }
  spdlog::info("best of {} configurations: {} (mAP {:.2f})", configs.size(), to_string(result.best),
               result.best_result.map);
  return kExitOk;
}

struct DaySetup {
  FrameCorpus corpus;
  Tables tables;
  GtOracle gt;
  FeatureTuple reference;
};

DaySetup day_setup(const RunConfig& cfg) {
  DaySetup d;
  d.corpus = open_corpus(cfg);
  const fs::path scene_dir = cfg.get_existing_path("scene");
  d.gt = load_scene_oracle(scene_dir);
  d.reference = scene_reference(scene_dir);
  d.tables = load_or_build_tables(cfg, d.corpus);
  return d;
}

VcDayEnv day_env(const RunConfig& cfg, const DaySetup& d) {
  const int source = brightest_interval(d.tables.vc);
  spdlog::info("simulating the day from interval {} ({})", source, TimeOfDay::of_interval(source).to_string());
  VcDayEnv env = simulate_day(d.corpus, d.tables.vc, d.tables.dt, source);
  const int tick = cfg.get_int("tick_frames", 1);
  if (tick < 1) throw ConfigError("tick_frames must be >= 1");
  env.set_tick_frames(tick);
  return env;
}

int cmd_tune(const RunConfig& cfg, const std::string& qtable_in) {
  const fs::path out = out_dir(cfg);
  const DaySetup d = day_setup(cfg);
  VcDayEnv env = day_env(cfg, d);
  SyntheticDetector detector(d.gt, response(cfg));
  auto estimator = make_estimator(cfg, detector, d.gt, d.reference);

  SarsaAgent agent(agent_config(cfg));
  if (!qtable_in.empty()) agent.q = QTable::from_json(read_json(qtable_in));
  std::vector<FeatureTuple> warmup;
  for (int i = 0; i < env.frame_count(); ++i) warmup.push_back(extract_features(env.raw_frame(i)));
  const StateEncoder encoder(FeatureBins::fit(warmup), agent.cfg.steps);
  const int passes = std::max(1, cfg.get_int("training_passes", 6));
  std::vector<TraceRow> trace;
  for (int pass = 0; pass < passes; ++pass) {
    env.reset();
    for (TraceRow row : run_episode(env, *estimator, agent, encoder, {env.ticks(), true})) {
      row.step += pass * env.ticks();
      trace.push_back(row);
    }
  }
  write_json(agent.q.to_json(), out / "qtable.json");
  write_trace_csv(trace, out / "trace.csv");
  spdlog::info("tuned for {} steps, {} states visited", trace.size(), agent.q.size());
  return kExitOk;
}

int cmd_ab_eval(const RunConfig& cfg) {
  const fs::path out = out_dir(cfg);
  const DaySetup d = day_setup(cfg);
  VcDayEnv env = day_env(cfg, d);
  SyntheticDetector detector(d.gt, response(cfg));
  auto estimator = make_estimator(cfg, detector, d.gt, d.reference);

  AbOptions opts;
  opts.agent = agent_config(cfg);
  opts.training_passes = cfg.get_int("training_passes", opts.training_passes);
  if (opts.training_passes < 0) throw ConfigError("training_passes must be >= 0");
  opts.upper_bound_levels = cfg.get_int("upper_bound_levels", opts.upper_bound_levels);
  if (opts.upper_bound_levels < 2) throw ConfigError("upper_bound_levels must be >= 2");
  const AbReport report = ab_evaluate(env, d.gt, detector, *estimator, opts);
  write_ab_report(report, out);
  spdlog::info("quality baseline {:.4f} tuned {:.4f} ({:+.2f} pp); mAP baseline {:.2f} tuned {:.2f}",
               report.baseline_quality, report.tuned_quality, report.quality_improvement_pp(), report.baseline_map,
               report.tuned_map);
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& camera_json, const std::string& synthetic_image,
                  const std::string& knob_name_arg, double step, const std::string& similarity) {
  const fs::path out = out_dir(cfg);
  std::unique_ptr<CameraDevice> cam;
  if (!camera_json.empty() == !synthetic_image.empty()) {
    throw ConfigError("give exactly one of --camera or --synthetic");
  }
  if (!camera_json.empty()) {
    if (!fs::exists(camera_json)) throw ConfigError("camera config does not exist: " + camera_json);
    HttpCameraConfig hc;
    try {
      hc = HttpCameraConfig::from_json(read_json(camera_json));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("camera config: ") + e.what());
    }
    cam = std::make_unique<HttpCamera>(hc);
  } else {
    if (!fs::exists(synthetic_image)) throw ConfigError("image does not exist: " + synthetic_image);
    const std::array<HiddenMap, 4> maps = {three_point_map(0.6, 1.0, 1.4), three_point_map(0.6, 1.0, 1.8),
                                           three_point_map(0.1, 1.0, 1.5), three_point_map(0.5, 1.0, 1.6)};
    cam = std::make_unique<SyntheticCamera>(read_image(synthetic_image), maps);
  }

  CalibrationOptions opts;
  if (similarity == "luma") {
    opts.similarity = Similarity::Luma;
  } else if (similarity == "rgb") {
    opts.similarity = Similarity::Rgb;
  } else if (similarity != "auto") {
    throw ConfigError("--similarity must be auto, luma or rgb");
  }
  if (!(step > 0.0 && step <= 0.5)) throw ConfigError("--step must lie in (0, 0.5]");

  std::vector<Knob> knobs;
  if (knob_name_arg == "all") {
    knobs.assign(kAllKnobs.begin(), kAllKnobs.end());
  } else if (const auto k = parse_knob(knob_name_arg)) {
    knobs.push_back(*k);
  } else {
    throw ConfigError("unknown knob '" + knob_name_arg + "'");
  }

  KnobMap map;
  const auto values = default_camera_values();
  for (Knob k : knobs) {
    map[k] = calibrate(*cam, k, values, knob_grid(k, step), opts);
    if (map[k].low_confidence) spdlog::warn("{}: SSIM barely varies, mapping is low confidence", knob_name(k));
  }
  write_json(knob_map_to_json(map), out / "knob_map.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("camknob");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");

  CLI::App app{"Camera knob auto-tuning toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  Overrides ov;

  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic day-long scene corpus");
  common_flags(gen, ov);
  bind(gen, ov, "--width", "scene_width", "frame width");
  bind(gen, ov, "--height", "scene_height", "frame height");
  bind(gen, ov, "--frames", "scene_frames", "frames per interval");
  bind(gen, ov, "--interval-stride", "scene_interval_stride", "generate every n-th 15 minute interval");
  bind(gen, ov, "--profile", "scene_profile", "day | flat");
  bind(gen, ov, "--noise", "scene_noise", "sensor noise standard deviation");

  auto* build = app.add_subcommand("vc-build", "profile a corpus into VC and delta tables");
  common_flags(build, ov);
  bind(build, ov, "--corpus", "corpus", "frame directory");
  bind(build, ov, "--delta-step", "delta_step", "delta grid step");

  std::string frame_path, t1_text, t2_text;
  auto* render = app.add_subcommand("vc-render", "re-render a frame to another time of day");
  common_flags(render, ov);
  render->add_option("--frame", frame_path, "input frame");
  render->add_option("--t1", t1_text, "capture time (default: from the frame name)");
  render->add_option("--t2", t2_text, "target time");
  bind(render, ov, "--vc", "vc_table", "VC table JSON");
  bind(render, ov, "--delta", "delta_table", "delta table JSON");

  std::string image_path, grid_name = "coarse";
  auto* sweep = app.add_subcommand("sweep", "rank knob configurations for one frame");
  common_flags(sweep, ov);
  sweep->add_option("--image", image_path, "frame to sweep (its stem keys the ground truth)");
  sweep->add_option("--grid", grid_name, "coarse | fine | levels per knob");
  bind(sweep, ov, "--scene", "scene", "scene directory");

  std::string qtable_in;
  auto* tune = app.add_subcommand("tune", "train the SARSA agent over the simulated day");
  common_flags(tune, ov);
  bind(tune, ov, "--corpus", "corpus", "frame directory");
  bind(tune, ov, "--scene", "scene", "scene directory");
  bind(tune, ov, "--vc", "vc_table", "VC table JSON");
  bind(tune, ov, "--delta", "delta_table", "delta table JSON");
  bind(tune, ov, "--estimator", "estimator", "oracle | proxy | external");
  bind(tune, ov, "--passes", "training_passes", "training days");
  tune->add_option("--qtable", qtable_in, "Q-table to continue from");

  auto* ab = app.add_subcommand("ab-eval", "baseline vs tuned evaluation over the simulated day");
  common_flags(ab, ov);
  bind(ab, ov, "--corpus", "corpus", "frame directory");
  bind(ab, ov, "--scene", "scene", "scene directory");
  bind(ab, ov, "--vc", "vc_table", "VC table JSON");
  bind(ab, ov, "--delta", "delta_table", "delta table JSON");
  bind(ab, ov, "--estimator", "estimator", "oracle | proxy | external");
  bind(ab, ov, "--passes", "training_passes", "training days before evaluation");
  ab->add_flag_function(
      "--noop-only", [&ov](std::int64_t) { ov.values["noop_only"] = "true"; }, "A/A run: agent only emits no-op");

  std::string camera_json, synthetic_image, knob_arg = "all", similarity = "auto";
  double step = 0.05;
  auto* cal = app.add_subcommand("calibrate", "map camera parameter values to virtual knob factors");
  common_flags(cal, ov);
  cal->add_option("--camera", camera_json, "HTTP camera description (JSON)");
  cal->add_option("--synthetic", synthetic_image, "calibrate a simulated camera showing this image");
  cal->add_option("--knob", knob_arg, "knob to calibrate, or all");
  cal->add_option("--step", step, "knob grid step");
  cal->add_option("--similarity", similarity, "auto | luma | rgb");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const RunConfig cfg = resolve(ov);
    if (gen->parsed()) return cmd_gen_scene(cfg);
    if (build->parsed()) return cmd_vc_build(cfg);
    if (render->parsed()) return cmd_vc_render(cfg, frame_path, t1_text, t2_text);
    if (sweep->parsed()) return cmd_sweep(cfg, image_path, grid_name);
    if (tune->parsed()) return cmd_tune(cfg, qtable_in);
    if (ab->parsed()) return cmd_ab_eval(cfg);
    if (cal->parsed()) return cmd_calibrate(cfg, camera_json, synthetic_image, knob_arg, step, similarity);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const ImageIoError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const CameraError& e) {
    spdlog::error("camera error: {}", e.what());
    return kExitData;
  } catch (const EstimatorUnavailable& e) {
    spdlog::error("estimator unavailable: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
