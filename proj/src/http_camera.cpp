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

#include "camknob/http_camera.hpp"

#include <httplib.h>

#include <cctype>
#include <regex>

#include "camknob/image_io.hpp"

namespace camknob {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string expand_template(const std::string& tmpl, const std::string& name, int value) {
  std::string out = tmpl;
  replace_all(out, "{name}", name);
  replace_all(out, "{value}", std::to_string(value));
  return out;
}

HttpCameraConfig HttpCameraConfig::from_json(const nlohmann::json& doc) {
  HttpCameraConfig cfg;
  cfg.host = doc.value("host", cfg.host);
  cfg.port = doc.value("port", cfg.port);
  cfg.set_method = doc.value("set_method", cfg.set_method);
  cfg.set_path = doc.value("set_path", cfg.set_path);
  cfg.get_path = doc.value("get_path", cfg.get_path);
  cfg.capture_path = doc.value("capture_path", cfg.capture_path);
  cfg.timeout = std::chrono::milliseconds(doc.value("timeout_ms", static_cast<int>(cfg.timeout.count())));
  if (doc.contains("param_names")) {
    for (Knob k : kAllKnobs) {
      const std::string key(knob_name(k));
      if (doc["param_names"].contains(key)) cfg.param_names[static_cast<int>(k)] = doc["param_names"][key];
    }
  }
  if (doc.contains("defaults")) {
    for (Knob k : kAllKnobs) {
      const std::string key(knob_name(k));
      if (doc["defaults"].contains(key)) cfg.defaults[k] = doc["defaults"][key];
    }
  }
  if (cfg.set_method != "GET" && cfg.set_method != "PUT") throw std::invalid_argument("set_method must be GET or PUT");
  return cfg;
}

HttpCamera::HttpCamera(HttpCameraConfig config)
    : config_(std::move(config)), client_(std::make_unique<httplib::Client>(config_.host, config_.port)) {
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client_->set_connection_timeout(secs.count(), usecs.count());
  client_->set_read_timeout(secs.count(), usecs.count());
}

HttpCamera::~HttpCamera() = default;

void HttpCamera::set_param(Knob knob, int value) {
  if (value < 0 || value > 100) throw std::out_of_range("camera parameter outside [0, 100]");
  const std::string path = expand_template(config_.set_path, config_.param_names[static_cast<int>(knob)], value);
  auto res = config_.set_method == "PUT" ? client_->Put(path, std::to_string(value), "text/plain") : client_->Get(path);
  if (!res) throw CameraError("set " + path + ": " + httplib::to_string(res.error()));
  if (res->status / 100 != 2) throw CameraError("set " + path + ": HTTP " + std::to_string(res->status));
}

int HttpCamera::get_param(Knob knob) const {
  const std::string path = expand_template(config_.get_path, config_.param_names[static_cast<int>(knob)], 0);
  auto res = client_->Get(path);
  if (!res) throw CameraError("get " + path + ": " + httplib::to_string(res.error()));
  if (res->status / 100 != 2) throw CameraError("get " + path + ": HTTP " + std::to_string(res->status));
  static const std::regex number("(\\d+)");
  int value = -1;
  for (std::sregex_iterator it(res->body.begin(), res->body.end(), number), end; it != end; ++it) {
    value = std::stoi((*it)[1].str());
  }
  if (value < 0) throw CameraError("get " + path + ": no value in response");
  return value;
}

ImageBuffer HttpCamera::capture() {
  auto res = client_->Get(config_.capture_path);
  if (!res) throw CameraError("capture: " + httplib::to_string(res.error()));
  if (res->status / 100 != 2) throw CameraError("capture: HTTP " + std::to_string(res->status));
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(res->body.data());
  try {
    return decode_png({bytes, res->body.size()});
  } catch (const ImageIoError& e) {
    throw CameraError(std::string("capture: ") + e.what());
  }
}

}  // namespace camknob
