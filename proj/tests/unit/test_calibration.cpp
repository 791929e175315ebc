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

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "camknob/calibration.hpp"
#include "camknob/http_camera.hpp"
#include "camknob/image_io.hpp"
#include "camknob/transforms.hpp"
#include "support.hpp"

using namespace camknob;
using camknob::testing::textured_image;
using camknob::testing::uniform_image;

namespace {

std::array<HiddenMap, 4> identity_maps() {
  const HiddenMap one = [](int) { return 1.0; };
  return {one, one, one, one};
}

// Hidden maps with factor 1.0 at the default setting of 50.
struct MapShape {
  const char* name;
  std::array<std::array<double, 2>, 4> ends;  // per knob: factor at 0, factor at 100
};

const MapShape kShapes[] = {
    {"linear", {{{0.6, 1.4}, {0.6, 1.4}, {0.2, 1.8}, {0.6, 1.4}}}},
    {"convex", {{{0.7, 1.55}, {0.7, 2.0}, {0.5, 2.0}, {0.7, 1.6}}}},
    {"concave", {{{0.6, 1.25}, {0.6, 1.3}, {0.2, 1.3}, {0.5, 1.2}}}},
};

}  // namespace

TEST_CASE("three-point maps pass through their anchors with the requested curvature") {
  const HiddenMap lin = three_point_map(0.6, 1.0, 1.4);
  CHECK(lin(0) == doctest::Approx(0.6));
  CHECK(lin(50) == doctest::Approx(1.0));
  CHECK(lin(100) == doctest::Approx(1.4));
  CHECK(lin(25) == doctest::Approx(0.8));
  const HiddenMap convex = three_point_map(0.7, 1.0, 2.0);
  CHECK(convex(25) < 0.85);  // below the chord
  const HiddenMap concave = three_point_map(0.6, 1.0, 1.3);
  CHECK(concave(75) > 1.15);  // above the chord
}

TEST_CASE("synthetic camera at default settings captures the base scene") {
  const ImageBuffer base = textured_image(40, 30, 2);
  std::array<HiddenMap, 4> maps;
  for (Knob k : kAllKnobs) maps[static_cast<int>(k)] = three_point_map(0.6, 1.0, 1.4);
  SyntheticCamera cam(base, maps);
  CHECK(cam.capture().same_pixels(base));
  CHECK(cam.hidden_config() == KnobConfig::identity());
}

TEST_CASE("synthetic camera applies its hidden map to the current setting") {
  const ImageBuffer base = textured_image(40, 30, 3);
  std::array<HiddenMap, 4> maps = identity_maps();
  maps[0] = [](int p) { return 0.6 + 0.01 * p; };
  CameraParams defaults;
  defaults.brightness = 40;
  SyntheticCamera cam(base, maps, defaults);
  CHECK(cam.capture().same_pixels(base));
  cam.set_param(Knob::Brightness, 100);
  CHECK(cam.get_param(Knob::Brightness) == 100);
  CHECK(cam.capture().same_pixels(apply_knob(base, Knob::Brightness, 1.6)));
  CHECK_THROWS(cam.set_param(Knob::Brightness, 101));
  CHECK_THROWS(cam.set_param(Knob::Brightness, -1));
}

TEST_CASE("set latency is honoured") {
  SyntheticCamera cam(textured_image(16, 16, 1), identity_maps(), {}, std::chrono::milliseconds{200});
  const auto t0 = std::chrono::steady_clock::now();
  cam.set_param(Knob::Contrast, 60);
  CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds{200});
}

TEST_CASE("brightness map 0.6 + 0.01p is recovered within one grid step") {
  const ImageBuffer base = textured_image(64, 48, 5);
  std::array<HiddenMap, 4> maps = identity_maps();
  maps[0] = [](int p) { return 0.6 + 0.01 * p; };
  CameraParams defaults;
  defaults.brightness = 40;
  SyntheticCamera cam(base, maps, defaults);
  const auto values = default_camera_values();
  const auto grid = knob_grid(Knob::Brightness);
  const CalibrationResult r = calibrate(cam, Knob::Brightness, values, grid);
  REQUIRE(r.points.size() == 11);
  for (const CalibrationPoint& pt : r.points) {
    CAPTURE(pt.camera_value);
    CHECK(std::abs(pt.factor - (0.6 + 0.01 * pt.camera_value)) <= 0.05 + 1e-9);
    CHECK(pt.best_ssim > 0.9);
  }
  CHECK_FALSE(r.low_confidence);
  CHECK(cam.get_param(Knob::Brightness) == 40);
}

TEST_CASE("the default setting maps to the grid value nearest 1.0") {
  std::array<HiddenMap, 4> maps;
  for (Knob k : kAllKnobs) maps[static_cast<int>(k)] = three_point_map(0.6, 1.0, 1.4);
  SyntheticCamera cam(textured_image(48, 36, 6), maps);
  const std::vector<int> values = {50};
  for (Knob k : kAllKnobs) {
    const auto grid = knob_grid(k);
    double nearest = grid.front();
    for (double g : grid)
      if (std::abs(g - 1.0) < std::abs(nearest - 1.0)) nearest = g;
    const CalibrationResult r = calibrate(cam, k, values, grid);
    CHECK(r.points[0].factor == nearest);
    CHECK(r.points[0].best_ssim == 1.0);
  }
}

TEST_CASE("knob grids cover the camera-equivalent ranges at 0.05") {
  for (Knob k : kAllKnobs) {
    const auto grid = knob_grid(k);
    const KnobRange range = knob_range(k);
    CHECK(grid.front() == doctest::Approx(range.lo));
    CHECK(grid.back() == doctest::Approx(range.hi));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.05));
  }
  CHECK_THROWS(knob_grid(Knob::Brightness, 0.0));
}

TEST_CASE("property: monotone hidden maps are recovered and stay monotone") {
  const ImageBuffer base = textured_image(64, 48, 9);
  const auto values = default_camera_values();
  for (const MapShape& shape : kShapes) {
    std::array<HiddenMap, 4> maps;
    for (Knob k : kAllKnobs) {
      const auto& e = shape.ends[static_cast<int>(k)];
      maps[static_cast<int>(k)] = three_point_map(e[0], 1.0, e[1]);
    }
    SyntheticCamera cam(base, maps);
    int hits = 0;
    int total = 0;
    for (Knob k : kAllKnobs) {
      const CalibrationResult r = calibrate(cam, k, values, knob_grid(k));
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        const CalibrationPoint& pt = r.points[i];
        ++total;
        if (std::abs(pt.factor - cam.hidden_factor(k, pt.camera_value)) <= 0.05 + 1e-9) ++hits;
        CHECK(pt.best_ssim > 0.9);
        if (i > 0) CHECK(pt.factor >= r.points[i - 1].factor - 0.05 - 1e-9);
      }
    }
    CAPTURE(shape.name);
    CHECK(hits >= 0.95 * total);
  }
}

TEST_CASE("calibration is deterministic") {
  std::array<HiddenMap, 4> maps;
  for (Knob k : kAllKnobs) maps[static_cast<int>(k)] = three_point_map(0.7, 1.0, 1.5);
  SyntheticCamera cam(textured_image(40, 30, 4), maps);
  const auto values = default_camera_values();
  const auto grid = knob_grid(Knob::Contrast);
  const CalibrationResult a = calibrate(cam, Knob::Contrast, values, grid);
  const CalibrationResult b = calibrate(cam, Knob::Contrast, values, grid);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].factor == b.points[i].factor);
    CHECK(a.points[i].best_ssim == b.points[i].best_ssim);
  }
}

TEST_CASE("a uniform scene is flagged as low confidence") {
  std::array<HiddenMap, 4> maps;
  for (Knob k : kAllKnobs) maps[static_cast<int>(k)] = three_point_map(0.6, 1.0, 1.4);
  SyntheticCamera cam(uniform_image(32, 32, 120, 120, 120), maps);
  const auto values = default_camera_values();
  CHECK(calibrate(cam, Knob::Sharpness, values, knob_grid(Knob::Sharpness)).low_confidence);
  CHECK_FALSE(calibrate(cam, Knob::Brightness, values, knob_grid(Knob::Brightness)).low_confidence);
}

TEST_CASE("calibrate rejects out-of-range camera values and empty grids") {
  SyntheticCamera cam(textured_image(24, 24, 1), identity_maps());
  const std::vector<int> bad = {0, 120};
  const auto grid = knob_grid(Knob::Brightness);
  CHECK_THROWS(calibrate(cam, Knob::Brightness, bad, grid));
  const std::vector<int> ok = {0, 50};
  const std::vector<double> empty;
  CHECK_THROWS(calibrate(cam, Knob::Brightness, ok, empty));
}

TEST_CASE("knob map JSON round trip and interpolation") {
  KnobMap map;
  CalibrationResult r;
  r.knob = Knob::Contrast;
  r.points = {{0, 0.6, 0.95}, {50, 1.0, 1.0}, {100, 1.8, 0.93}};
  map[Knob::Contrast] = r;
  const auto doc = knob_map_to_json(map);
  CHECK(doc.contains("contrast"));
  CHECK(doc["contrast"][2][1].get<double>() == 1.8);
  const KnobMap back = knob_map_from_json(doc);
  REQUIRE(back.count(Knob::Contrast) == 1);
  CHECK(back.at(Knob::Contrast).points.size() == 3);
  CHECK(back.at(Knob::Contrast).points[2].best_ssim == 0.93);

  CHECK(factor_for_camera_value(r, 25) == doctest::Approx(0.8));
  CHECK(factor_for_camera_value(r, 75) == doctest::Approx(1.4));
  CHECK(factor_for_camera_value(r, -5) == 0.6);
  CHECK(factor_for_camera_value(r, 500) == 1.8);

  CHECK_THROWS(knob_map_from_json(nlohmann::json::parse(R"({"gamma": []})")));
  CHECK_THROWS(knob_map_from_json(nlohmann::json::parse(R"({"contrast": [[1, 2]]})")));
}

TEST_CASE("template expansion substitutes name and value") {
  CHECK(expand_template("/param?action=update&{name}={value}", "Brightness", 70) ==
        "/param?action=update&Brightness=70");
  CHECK(expand_template("/{name}/{name}", "x", 1) == "/x/x");
}

TEST_CASE("HTTP camera drives a local server through the templated contract") {
  const ImageBuffer base = textured_image(32, 24, 7);
  std::mutex mu;
  std::map<std::string, int> params = {{"bri", 50}, {"con", 50}, {"sat", 50}, {"shp", 50}};

  httplib::Server server;
  server.Get("/set", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    for (const auto& [k, v] : req.params) params[k] = std::stoi(v);
    res.set_content("OK", "text/plain");
  });
  server.Get("/get", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const std::string name = req.get_param_value("name");
    res.set_content(name + "=" + std::to_string(params[name]), "text/plain");
  });
  server.Get("/snap.png", [&](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu);
    const double f = params["bri"] / 50.0;
    const auto png = encode_png(apply_knob(base, Knob::Brightness, f));
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpCameraConfig cfg;
  cfg.port = port;
  cfg.set_path = "/set?{name}={value}";
  cfg.get_path = "/get?name={name}";
  cfg.capture_path = "/snap.png";
  cfg.param_names = {"bri", "con", "sat", "shp"};
  HttpCamera cam(cfg);

  CHECK(cam.capture().same_pixels(base));
  cam.set_param(Knob::Brightness, 60);
  CHECK(cam.get_param(Knob::Brightness) == 60);
  CHECK(cam.capture().same_pixels(apply_knob(base, Knob::Brightness, 1.2)));

  cfg.capture_path = "/missing.png";
  HttpCamera broken(cfg);
  CHECK_THROWS_AS(broken.capture(), CameraError);

  server.stop();
  worker.join();
}
