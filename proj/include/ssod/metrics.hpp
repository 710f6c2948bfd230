#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssod/types.hpp"

namespace ssod {

// IoU thresholds 0.50, 0.55, ..., 0.95.
inline constexpr int kNumIouThresholds = 10;
std::array<double, kNumIouThresholds> iou_thresholds();

struct MatchResult {
  struct DetMatch {
    int det_index = -1;  // index into the input detection list
    double confidence = 0.0;
    bool is_tp = false;
    int gt_index = -1;  // index into the input ground-truth list, -1 if FP
  };
  // Class-filtered detections in confidence-descending order (ties by input
  // index).
  std::vector<DetMatch> detections;
  std::vector<int> gt_indices;      // class-filtered ground-truth indices
  std::vector<bool> gt_matched;     // parallel to gt_indices
  int64_t num_gt = 0;
};

// Greedy: each detection, best first, claims the unmatched same-class GT
// with the highest IoU >= iou_thr; ties go to the lowest GT index.
MatchResult match_at_iou(std::span<const Detection> dets,
                         std::span<const GroundTruthBox> gts, double iou_thr,
                         int class_id);

// 101-point interpolated AP over the confidence-ranked PR curve. 0 when the
// class has no ground truth.
double average_precision(std::span<const Detection> dets,
                         std::span<const GroundTruthBox> gts, double iou_thr,
                         int class_id);

struct ClassEval {
  std::string name;
  int64_t num_gt = 0;
  std::array<double, kNumIouThresholds> ap_per_threshold{};
  double ap50 = 0.0;
  double ap50_95 = 0.0;
};

struct DetectionEvalReport {
  std::map<int, ClassEval> per_class;
  double map50 = 0.0;
  double map50_95 = 0.0;
  // Dataset-level micro precision/recall at conf_threshold, IoU 0.5.
  double conf_threshold = 0.0;
  double precision = 0.0;
  bool precision_undefined = false;  // no detections above the threshold
  double recall = 0.0;
  int64_t tp = 0, fp = 0, fn = 0;
};

// Per-class AP at each IoU threshold with per-image matching and a global
// confidence ranking (ties by image_id, then box index). mAP averages over
// classes with >= 1 ground-truth box.
DetectionEvalReport evaluate_detection(const TeacherPredictions& preds,
                                       const DatasetManifest& truth,
                                       double conf_thr_for_pr, int jobs = 1);

struct ClassificationReport {
  int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  // 0 when precision + recall == 0
};

ClassificationReport evaluate_classification(std::span<const int> pred_labels,
                                             std::span<const int> true_labels);

nlohmann::json to_json(const DetectionEvalReport& report);
nlohmann::json to_json(const ClassificationReport& report);
std::string to_text_table(const DetectionEvalReport& report);
std::string to_text_table(const ClassificationReport& report);

}  // namespace ssod
