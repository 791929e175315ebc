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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "camknob/deteval.hpp"
#include "camknob/image.hpp"
#include "camknob/metrics.hpp"

namespace camknob {

struct QualityEstimate {
  double value = 0.0;              // [0, 1]
  std::optional<int> class_label;  // present for label-producing estimators
};

/// Raised when an estimator cannot score a frame (external process timed
/// out, died, or replied with garbage). Never silently mapped to 0.
class EstimatorUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QualityEstimator {
 public:
  virtual ~QualityEstimator() = default;
  virtual QualityEstimate estimate(const ImageBuffer& img) = 0;
};

inline constexpr int kDetectionMaxLabel = 200;
inline constexpr int kRecognitionMaxLabel = 100;

/// round(map + mean_tp_iou * 100), clamped to [0, 200]. map in [0, 100],
/// mean_tp_iou in [0, 1]; anything else throws std::invalid_argument.
int detection_label(double map, double mean_tp_iou);

/// Scores a frame with the exact label a trained detection-quality network
/// would be taught to predict: detector output evaluated against ground truth.
class OracleEstimator : public QualityEstimator {
 public:
  OracleEstimator(Detector& detector, GtOracle gt);
  QualityEstimate estimate(const ImageBuffer& img) override;

 private:
  Detector& detector_;
  GtOracle gt_;
};

/// Ground-truth-free surrogate:
///   exp(-sum_i w_i * |f_i - ideal_i| / ideal_i)
/// A zero ideal component falls back to the absolute difference.
class ProxyEstimator : public QualityEstimator {
 public:
  ProxyEstimator(FeatureTuple ideal, std::array<double, 4> weights);
  QualityEstimate estimate(const ImageBuffer& img) override;
  double score(const FeatureTuple& features) const;

 private:
  FeatureTuple ideal_;
  std::array<double, 4> weights_;
};

/// Talks to a model server over the stdio of a child process.
///
/// Request:  4-byte big-endian length, then that many bytes of PNG.
/// Response: one line, either `label <int>` (scaled by max_label) or
///           `value <float>` in [0, 1].
///
/// Requests are serialized. A timeout, EOF or malformed line raises
/// EstimatorUnavailable and the child is restarted on the next request.
class ExternalEstimator : public QualityEstimator {
 public:
  ExternalEstimator(std::vector<std::string> argv, std::chrono::milliseconds timeout = std::chrono::milliseconds{1000},
                    int max_label = kDetectionMaxLabel);
  ~ExternalEstimator() override;

  ExternalEstimator(const ExternalEstimator&) = delete;
  ExternalEstimator& operator=(const ExternalEstimator&) = delete;

  QualityEstimate estimate(const ImageBuffer& img) override;

 private:
  void start();
  void stop();
  void write_all(const std::uint8_t* data, std::size_t len);
  std::string read_line();

  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  int max_label_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

/// Parses one response line of the external protocol.
QualityEstimate parse_estimator_reply(const std::string& line, int max_label);

/// Quality-threshold frame filter. A frame whose estimate falls below the
/// threshold is dropped, except that after `recovery_n` consecutive drops
/// the next frame is passed regardless and the run counter resets.
/// Holds mutable state; confine to one pipeline thread.
class AquaGate {
 public:
  struct Decision {
    bool pass = false;
    bool forced = false;
    QualityEstimate estimate;
  };

  AquaGate(QualityEstimator& estimator, double drop_threshold, int recovery_n);

  Decision admit(const ImageBuffer& frame);
  /// Gate decision for an already computed score.
  Decision admit_score(double value);

  int consecutive_drops() const { return drops_; }

 private:
  QualityEstimator* estimator_;
  double threshold_;
  int recovery_n_;
  int drops_ = 0;
};

}  // namespace camknob
