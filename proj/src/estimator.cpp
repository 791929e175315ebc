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

#include "camknob/estimator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cmath>
#include <cstring>
#include <sstream>

#include "camknob/errors.hpp"
#include "camknob/image_io.hpp"

namespace camknob {

int detection_label(double map, double mean_tp_iou) {
  if (!(map >= 0.0 && map <= 100.0)) throw std::invalid_argument("mAP must lie in [0, 100]");
  if (!(mean_tp_iou >= 0.0 && mean_tp_iou <= 1.0)) throw std::invalid_argument("TP IoU must lie in [0, 1]");
  const long label = std::lround(map + mean_tp_iou * 100.0);
  return static_cast<int>(std::clamp<long>(label, 0, kDetectionMaxLabel));
}

OracleEstimator::OracleEstimator(Detector& detector, GtOracle gt) : detector_(detector), gt_(std::move(gt)) {
  if (!gt_) throw std::invalid_argument("OracleEstimator needs a ground-truth source");
}

QualityEstimate OracleEstimator::estimate(const ImageBuffer& img) {
  const auto scene = gt_(img.tag);
  if (!scene) throw DataError("no ground truth for frame '" + img.tag + "'");
  const EvalResult r = evaluate(detector_.detect(img), scene->boxes);
  const int label = detection_label(r.map, r.mean_tp_iou);
  return {static_cast<double>(label) / kDetectionMaxLabel, label};
}

ProxyEstimator::ProxyEstimator(FeatureTuple ideal, std::array<double, 4> weights) : ideal_(ideal), weights_(weights) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("proxy weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("proxy weights must sum to 1");
}

double ProxyEstimator::score(const FeatureTuple& f) const {
  double e = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double scale = ideal_[i] > 0.0 ? ideal_[i] : 1.0;
    e += weights_[i] * std::abs(f[i] - ideal_[i]) / scale;
  }
  return std::exp(-e);
}

QualityEstimate ProxyEstimator::estimate(const ImageBuffer& img) { return {score(extract_features(img)), std::nullopt}; }

QualityEstimate parse_estimator_reply(const std::string& line, int max_label) {
  std::istringstream in(line);
  std::string kind;
  std::string number;
  std::string extra;
  if (!(in >> kind >> number) || (in >> extra)) throw EstimatorUnavailable("malformed estimator reply: '" + line + "'");
  std::size_t used = 0;
  try {
    if (kind == "label") {
      const int label = std::stoi(number, &used);
      if (used != number.size() || label < 0 || label > max_label) throw std::invalid_argument("range");
      return {static_cast<double>(label) / max_label, label};
    }
    if (kind == "value") {
      const double v = std::stod(number, &used);
      if (used != number.size() || !(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("range");
      return {v, std::nullopt};
    }
  } catch (const std::exception&) {
    throw EstimatorUnavailable("malformed estimator reply: '" + line + "'");
  }
  throw EstimatorUnavailable("malformed estimator reply: '" + line + "'");
}

ExternalEstimator::ExternalEstimator(std::vector<std::string> argv, std::chrono::milliseconds timeout, int max_label)
    : argv_(std::move(argv)), timeout_(timeout), max_label_(max_label) {
  if (argv_.empty()) throw std::invalid_argument("external estimator command is empty");
  if (max_label_ <= 0) throw std::invalid_argument("max_label must be positive");
  // A dead child must surface as EPIPE on write, not kill this process.
  std::signal(SIGPIPE, SIG_IGN);
}

ExternalEstimator::~ExternalEstimator() { stop(); }

void ExternalEstimator::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw EstimatorUnavailable("pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw EstimatorUnavailable("pipe failed");
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw EstimatorUnavailable("fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  pending_.clear();
}

void ExternalEstimator::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  pending_.clear();
}

void ExternalEstimator::write_all(const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = write(to_child_, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EstimatorUnavailable(std::string("write to estimator failed: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

std::string ExternalEstimator::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw EstimatorUnavailable("estimator timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw EstimatorUnavailable("poll failed");
    }
    if (ready == 0) throw EstimatorUnavailable("estimator timed out");
    char buf[256];
    const ssize_t n = read(from_child_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw EstimatorUnavailable("estimator closed its output");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

QualityEstimate ExternalEstimator::estimate(const ImageBuffer& img) {
  const std::vector<std::uint8_t> png = encode_png(img);
  if (pid_ < 0) start();
  try {
    const auto len = static_cast<std::uint32_t>(png.size());
    const std::uint8_t header[4] = {static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
                                    static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
    write_all(header, 4);
    write_all(png.data(), png.size());
    return parse_estimator_reply(read_line(), max_label_);
  } catch (const EstimatorUnavailable&) {
    stop();
    throw;
  }
}

AquaGate::AquaGate(QualityEstimator& estimator, double drop_threshold, int recovery_n)
    : estimator_(&estimator), threshold_(drop_threshold), recovery_n_(recovery_n) {
  if (recovery_n_ < 1) throw std::invalid_argument("recovery_n must be >= 1");
}

AquaGate::Decision AquaGate::admit(const ImageBuffer& frame) {
  const QualityEstimate est = estimator_->estimate(frame);
  Decision d = admit_score(est.value);
  d.estimate = est;
  return d;
}

AquaGate::Decision AquaGate::admit_score(double value) {
  Decision d;
  d.estimate.value = value;
  if (value >= threshold_) {
    d.pass = true;
    drops_ = 0;
  } else if (drops_ >= recovery_n_) {
    d.pass = true;
    d.forced = true;
    drops_ = 0;
  } else {
    ++drops_;
  }
  return d;
}

}  // namespace camknob
