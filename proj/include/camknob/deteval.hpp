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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "camknob/image.hpp"
#include "camknob/metrics.hpp"

namespace camknob {

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  int class_id = 0;
  double score = 1.0;  // detections only

  bool valid() const { return x_min < x_max && y_min < y_max; }
  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

double iou(const BoundingBox& a, const BoundingBox& b);

struct EvalResult {
  double map = 0.0;          // [0, 100]
  double mean_tp_iou = 0.0;  // 0 when tp == 0
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

inline constexpr double kDefaultIouThreshold = 0.5;

/// Detections and ground truth of one frame.
struct FrameBoxes {
  std::vector<BoundingBox> dets;
  std::vector<BoundingBox> gt;
};

/// mAP at a single IoU threshold. Detections are matched greedily in
/// descending score order (ties: larger IoU, then input order); a match
/// needs the same class and IoU strictly above the threshold, and each GT
/// box is matched at most once. AP per class is the area under the
/// all-point interpolated precision/recall curve; mAP averages classes that
/// have ground truth.
EvalResult evaluate(std::span<const BoundingBox> dets, std::span<const BoundingBox> gt,
                    double iou_threshold = kDefaultIouThreshold);

/// Same, pooling detections of several frames into one PR curve per class.
EvalResult evaluate_frames(std::span<const FrameBoxes> frames, double iou_threshold = kDefaultIouThreshold);

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<BoundingBox> detect(const ImageBuffer& img) = 0;
};

/// What a synthetic scene knows about itself: its objects and the features
/// of its reference (best-looking) rendering.
struct SceneDescriptor {
  std::vector<BoundingBox> boxes;
  FeatureTuple reference;
};

/// Looks up the scene descriptor for a frame tag.
using GtOracle = std::function<std::optional<SceneDescriptor>(const std::string& tag)>;

/// Detection quality in [0, 1] as a function of the frame's effective
/// configuration, i.e. its measured features relative to the reference.
using QualityResponse = std::function<double(const KnobConfig&)>;

/// Gaussian bump centred at `peak`: exp(-sum(((x_k - peak_k) / width)^2)).
QualityResponse peaked_response(const KnobConfig& peak, double width = 0.35);

/// Feature ratios of a frame against the reference, read as a knob config.
KnobConfig effective_config(const FeatureTuple& measured, const FeatureTuple& reference);

/// Deterministic stand-in for a neural detector. It reads the scene's ground
/// truth through the oracle and degrades it by the quality q of the frame:
/// box i of n survives when q >= 0.5 * (i + 0.5) / n, surviving boxes shift
/// right by (1 - q) / 4 of their width, and scores equal q. q = 1 reproduces
/// the ground truth; q = 0 detects nothing.
class SyntheticDetector : public Detector {
 public:
  SyntheticDetector(GtOracle oracle, QualityResponse response);

  std::vector<BoundingBox> detect(const ImageBuffer& img) override;

  /// Quality the detector assigns to a frame.
  double quality(const ImageBuffer& img) const;

 private:
  GtOracle oracle_;
  QualityResponse response_;
};

struct RankedConfig {
  KnobConfig config;
  EvalResult result;
};

struct SweepResult {
  KnobConfig best;
  EvalResult best_result;
  std::vector<RankedConfig> ranking;  // best first
  int excluded = 0;                   // configs whose detection failed
};

/// Renders the image with every config, scores the detections against gt and
/// ranks by (mAP desc, mean TP IoU desc, config ascending).
SweepResult find_best_config(const ImageBuffer& img, std::span<const BoundingBox> gt, Detector& detector,
                             std::span<const KnobConfig> configs);

/// Cartesian product of `levels` evenly spaced values over each knob range
/// (levels >= 2), in lexicographic order.
std::vector<KnobConfig> config_grid(int levels);

bool ranks_before(const RankedConfig& a, const RankedConfig& b);

/// JSON-lines records: {"frame_id": "...", "boxes": [{"x1","y1","x2","y2","class","score"?}]}
using BoxRecords = std::map<std::string, std::vector<BoundingBox>>;
BoxRecords read_box_records(const std::filesystem::path& path);
/// Scores are written only when `with_scores` is set (detections, not GT).
void write_box_records(const BoxRecords& records, const std::filesystem::path& path, bool with_scores = false);
nlohmann::json box_to_json(const BoundingBox& box, bool with_score);
BoundingBox box_from_json(const nlohmann::json& j);

}  // namespace camknob
