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
#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "camknob/calibration.hpp"

namespace httplib {
class Client;
}

namespace camknob {

class CameraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generic HTTP camera contract. Templates use `{name}` and `{value}`
/// placeholders; `{name}` expands to the vendor name of the parameter.
///
///   set:     <set_method> <set_path>      e.g. "/param?action=update&{name}={value}"
///   get:     GET <get_path>               body holds the value (last integer wins)
///   capture: GET <capture_path>           body is a PNG image
struct HttpCameraConfig {
  std::string host = "127.0.0.1";
  int port = 80;
  std::string set_method = "GET";  // GET or PUT
  std::string set_path = "/param?{name}={value}";
  std::string get_path = "/param?{name}";
  std::string capture_path = "/snapshot.png";
  std::array<std::string, 4> param_names = {"brightness", "contrast", "saturation", "sharpness"};
  std::chrono::milliseconds timeout{2000};
  CameraParams defaults{};

  static HttpCameraConfig from_json(const nlohmann::json& doc);
};

std::string expand_template(const std::string& tmpl, const std::string& name, int value);

class HttpCamera : public CameraDevice {
 public:
  explicit HttpCamera(HttpCameraConfig config);
  ~HttpCamera() override;

  void set_param(Knob knob, int value) override;
  int get_param(Knob knob) const override;
  ImageBuffer capture() override;
  int default_value(Knob knob) const override { return config_.defaults[knob]; }

 private:
  HttpCameraConfig config_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace camknob
