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

#include "camknob/deteval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "camknob/errors.hpp"
#include "camknob/transforms.hpp"

namespace camknob {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

struct Candidate {
  std::size_t frame;
  std::size_t index;  // position in the frame's detection list
  const BoundingBox* box;
  double best_iou;  // against any same-class GT in its frame, used for tie-breaks
};

double average_precision(const std::vector<bool>& is_tp, int npos) {
  std::vector<double> rec;
  std::vector<double> prec;
  int tp = 0;
  int fp = 0;
  for (bool hit : is_tp) {
    hit ? ++tp : ++fp;
    rec.push_back(static_cast<double>(tp) / npos);
    prec.push_back(static_cast<double>(tp) / (tp + fp));
  }
  // All-point interpolation: precision envelope, integrated over recall steps.
  std::vector<double> mrec = {0.0};
  mrec.insert(mrec.end(), rec.begin(), rec.end());
  mrec.push_back(1.0);
  std::vector<double> mpre = {0.0};
  mpre.insert(mpre.end(), prec.begin(), prec.end());
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  }
  return ap;
}

}  // namespace

EvalResult evaluate_frames(std::span<const FrameBoxes> frames, double iou_threshold) {
  std::set<int> gt_classes;
  int total_gt = 0;
  int total_dets = 0;
  for (const FrameBoxes& f : frames) {
    for (const BoundingBox& g : f.gt) {
      if (!g.valid()) throw std::invalid_argument("invalid ground-truth box");
      gt_classes.insert(g.class_id);
    }
    for (const BoundingBox& d : f.dets) {
      if (!d.valid()) throw std::invalid_argument("invalid detection box");
    }
    total_gt += static_cast<int>(f.gt.size());
    total_dets += static_cast<int>(f.dets.size());
  }

  EvalResult result;
  double iou_sum = 0.0;
  double ap_sum = 0.0;

  for (int cls : gt_classes) {
    std::vector<Candidate> cands;
    int npos = 0;
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
      const FrameBoxes& f = frames[fi];
      for (const BoundingBox& g : f.gt) npos += g.class_id == cls;
      for (std::size_t di = 0; di < f.dets.size(); ++di) {
        const BoundingBox& d = f.dets[di];
        if (d.class_id != cls) continue;
        double best = 0.0;
        for (const BoundingBox& g : f.gt) {
          if (g.class_id == cls) best = std::max(best, iou(d, g));
        }
        cands.push_back({fi, di, &d, best});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.box->score != b.box->score) return a.box->score > b.box->score;
      return a.best_iou > b.best_iou;
    });

    std::vector<std::vector<bool>> used(frames.size());
    for (std::size_t fi = 0; fi < frames.size(); ++fi) used[fi].assign(frames[fi].gt.size(), false);

    std::vector<bool> is_tp;
    is_tp.reserve(cands.size());
    for (const Candidate& c : cands) {
      const auto& gts = frames[c.frame].gt;
      double best = iou_threshold;
      std::optional<std::size_t> match;
      for (std::size_t gi = 0; gi < gts.size(); ++gi) {
        if (gts[gi].class_id != cls || used[c.frame][gi]) continue;
        const double v = iou(*c.box, gts[gi]);
        if (v > best) {
          best = v;
          match = gi;
        }
      }
      if (match) {
        used[c.frame][*match] = true;
        iou_sum += best;
        ++result.tp;
      }
      is_tp.push_back(match.has_value());
    }
    ap_sum += average_precision(is_tp, npos);
  }

  result.fp = total_dets - result.tp;
  result.fn = total_gt - result.tp;
  result.map = gt_classes.empty() ? 0.0 : 100.0 * ap_sum / static_cast<double>(gt_classes.size());
  result.mean_tp_iou = result.tp > 0 ? iou_sum / result.tp : 0.0;
  return result;
}

EvalResult evaluate(std::span<const BoundingBox> dets, std::span<const BoundingBox> gt, double iou_threshold) {
  const FrameBoxes frame{{dets.begin(), dets.end()}, {gt.begin(), gt.end()}};
  return evaluate_frames(std::span<const FrameBoxes>(&frame, 1), iou_threshold);
}

QualityResponse peaked_response(const KnobConfig& peak, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("response width must be positive");
  return [peak, width](const KnobConfig& c) {
    double e = 0.0;
    for (Knob k : kAllKnobs) {
      const double d = (c[k] - peak[k]) / width;
      e += d * d;
    }
    return std::exp(-e);
  };
}

KnobConfig effective_config(const FeatureTuple& measured, const FeatureTuple& reference) {
  KnobConfig c;
  for (Knob k : kAllKnobs) {
    const auto i = static_cast<std::size_t>(k);
    c[k] = measured[i] / std::max(reference[i], 1e-3);
  }
  return c;
}

SyntheticDetector::SyntheticDetector(GtOracle oracle, QualityResponse response)
    : oracle_(std::move(oracle)), response_(std::move(response)) {
  if (!oracle_ || !response_) throw std::invalid_argument("SyntheticDetector needs an oracle and a response");
}

double SyntheticDetector::quality(const ImageBuffer& img) const {
  const auto scene = oracle_(img.tag);
  if (!scene) throw DataError("frame '" + img.tag + "' carries no scene descriptor");
  const double q = response_(effective_config(extract_features(img), scene->reference));
  return std::clamp(q, 0.0, 1.0);
}

std::vector<BoundingBox> SyntheticDetector::detect(const ImageBuffer& img) {
  const auto scene = oracle_(img.tag);
  if (!scene) throw DataError("frame '" + img.tag + "' carries no scene descriptor");
  const double q = quality(img);
  const std::size_t n = scene->boxes.size();
  std::vector<BoundingBox> dets;
  for (std::size_t i = 0; i < n; ++i) {
    const double keep_at = 0.5 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    if (q < keep_at) continue;
    BoundingBox d = scene->boxes[i];
    const double shift = 0.25 * (1.0 - q) * (d.x_max - d.x_min);
    d.x_min += shift;
    d.x_max += shift;
    d.score = q;
    dets.push_back(d);
  }
  return dets;
}

bool ranks_before(const RankedConfig& a, const RankedConfig& b) {
  if (a.result.map != b.result.map) return a.result.map > b.result.map;
  if (a.result.mean_tp_iou != b.result.mean_tp_iou) return a.result.mean_tp_iou > b.result.mean_tp_iou;
  return a.config < b.config;
}

SweepResult find_best_config(const ImageBuffer& img, std::span<const BoundingBox> gt, Detector& detector,
                             std::span<const KnobConfig> configs) {
  if (configs.empty()) throw std::invalid_argument("find_best_config: no configurations");
  SweepResult out;
  for (const KnobConfig& c : configs) {
    try {
      const ImageBuffer aug = apply_config(img, c);
      const std::vector<BoundingBox> dets = detector.detect(aug);
      out.ranking.push_back({c, evaluate(dets, gt)});
    } catch (const std::exception& e) {
      ++out.excluded;
      spdlog::warn("config {} excluded: {}", to_string(c), e.what());
    }
  }
  if (out.ranking.empty()) throw DataError("find_best_config: detector failed on every configuration");
  std::sort(out.ranking.begin(), out.ranking.end(), ranks_before);
  out.best = out.ranking.front().config;
  out.best_result = out.ranking.front().result;
  return out;
}

std::vector<KnobConfig> config_grid(int levels) {
  if (levels < 2) throw std::invalid_argument("config grid needs at least 2 levels per knob");
  std::array<std::vector<double>, 4> axes;
  for (Knob k : kAllKnobs) {
    const KnobRange r = knob_range(k);
    for (int i = 0; i < levels; ++i) {
      const double v = r.lo + r.width() * i / (levels - 1);
      axes[static_cast<int>(k)].push_back(std::round(v * 1e9) / 1e9);
    }
  }
  std::vector<KnobConfig> out;
  for (double b : axes[0])
    for (double c : axes[1])
      for (double s : axes[2])
        for (double sh : axes[3]) out.push_back({b, c, s, sh});
  return out;
}

nlohmann::json box_to_json(const BoundingBox& box, bool with_score) {
  nlohmann::json j = {{"x1", box.x_min}, {"y1", box.y_min}, {"x2", box.x_max}, {"y2", box.y_max},
                      {"class", box.class_id}};
  if (with_score) j["score"] = box.score;
  return j;
}

BoundingBox box_from_json(const nlohmann::json& j) {
  BoundingBox b;
  b.x_min = j.at("x1").get<double>();
  b.y_min = j.at("y1").get<double>();
  b.x_max = j.at("x2").get<double>();
  b.y_max = j.at("y2").get<double>();
  b.class_id = j.value("class", 0);
  b.score = j.value("score", 1.0);
  if (!b.valid()) throw DataError("degenerate box in records");
  return b;
}

BoxRecords read_box_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open box records " + path.string());
  BoxRecords records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::vector<BoundingBox> boxes;
      for (const auto& b : j.at("boxes")) boxes.push_back(box_from_json(b));
      records[j.at("frame_id").get<std::string>()] = std::move(boxes);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void write_box_records(const BoxRecords& records, const std::filesystem::path& path, bool with_scores) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write box records " + path.string());
  for (const auto& [id, boxes] : records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const BoundingBox& b : boxes) arr.push_back(box_to_json(b, with_scores));
    out << nlohmann::json{{"frame_id", id}, {"boxes", std::move(arr)}}.dump() << '\n';
  }
}

}  // namespace camknob
