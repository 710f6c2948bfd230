#pragma once

// Test-only reference implementations, deliberately independent of the
// library path: quadratic matching straight from the rule's definition and
// AP by brute-force scanning of every PR prefix at every recall point.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "ssod/types.hpp"

namespace oracle {

inline double box_iou(const ssod::BBox& a, const ssod::BBox& b) {
  double ix = std::max(0.0, std::min(a.x_max, b.x_max) -
                                std::max(a.x_min, b.x_min));
  double iy = std::max(0.0, std::min(a.y_max, b.y_max) -
                                std::max(a.y_min, b.y_min));
  double inter = ix * iy;
  double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

struct RankedFlag {
  double confidence = 0.0;
  bool tp = false;
};

// Confidence-descending greedy matching (ties by input order via selection
// over the remaining maximum), each detection claiming the unmatched
// ground-truth with the highest IoU >= thr, ties to the lowest index.
inline std::vector<RankedFlag> naive_match(
    std::span<const ssod::Detection> dets,
    std::span<const ssod::GroundTruthBox> gts, double iou_thr, int class_id) {
  std::vector<size_t> det_ids;
  for (size_t i = 0; i < dets.size(); ++i)
    if (dets[i].class_id == class_id) det_ids.push_back(i);
  std::vector<size_t> gt_ids;
  for (size_t i = 0; i < gts.size(); ++i)
    if (gts[i].class_id == class_id) gt_ids.push_back(i);

  std::vector<bool> det_used(det_ids.size(), false);
  std::vector<bool> gt_used(gt_ids.size(), false);
  std::vector<RankedFlag> ranked;
  for (size_t round = 0; round < det_ids.size(); ++round) {
    // Next unprocessed detection with the highest confidence (earliest wins
    // ties).
    size_t pick = det_ids.size();
    for (size_t i = 0; i < det_ids.size(); ++i) {
      if (det_used[i]) continue;
      if (pick == det_ids.size() ||
          dets[det_ids[i]].confidence > dets[det_ids[pick]].confidence)
        pick = i;
    }
    det_used[pick] = true;
    const ssod::Detection& det = dets[det_ids[pick]];

    size_t best = gt_ids.size();
    double best_iou = 0.0;
    for (size_t j = 0; j < gt_ids.size(); ++j) {
      if (gt_used[j]) continue;
      double v = box_iou(det.bbox, gts[gt_ids[j]].bbox);
      if (v < iou_thr) continue;
      if (best == gt_ids.size() || v > best_iou) {
        best = j;
        best_iou = v;
      }
    }
    RankedFlag flag{det.confidence, false};
    if (best != gt_ids.size()) {
      gt_used[best] = true;
      flag.tp = true;
    }
    ranked.push_back(flag);
  }
  return ranked;
}

// Brute-force 101-point AP: for each recall level scan every ranked prefix.
inline double naive_ap_from_ranked(const std::vector<RankedFlag>& ranked,
                                   size_t num_gt) {
  if (num_gt == 0) return 0.0;
  double ap = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    double best_precision = 0.0;
    size_t tp = 0;
    for (size_t k = 0; k < ranked.size(); ++k) {
      if (ranked[k].tp) ++tp;
      double recall = static_cast<double>(tp) / static_cast<double>(num_gt);
      double precision =
          static_cast<double>(tp) / static_cast<double>(k + 1);
      if (recall >= r) best_precision = std::max(best_precision, precision);
    }
    ap += best_precision;
  }
  return ap / 101.0;
}

inline double naive_average_precision(
    std::span<const ssod::Detection> dets,
    std::span<const ssod::GroundTruthBox> gts, double iou_thr, int class_id) {
  size_t num_gt = 0;
  for (const auto& gt : gts)
    if (gt.class_id == class_id) ++num_gt;
  return naive_ap_from_ranked(naive_match(dets, gts, iou_thr, class_id),
                              num_gt);
}

}  // namespace oracle
