#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "ssod/errors.hpp"
#include "ssod/kernels.hpp"
#include "ssod/metrics.hpp"
#include "ssod/parallel.hpp"

namespace ssod {

std::array<double, kNumIouThresholds> iou_thresholds() {
  return {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

MatchResult match_at_iou(std::span<const Detection> dets,
                         std::span<const GroundTruthBox> gts, double iou_thr,
                         int class_id) {
  if (!(iou_thr > 0.0 && iou_thr <= 1.0))
    throw ValidationError("iou threshold must be in (0, 1]");

  MatchResult result;
  kernels::BoxesSoA gt_boxes;
  for (size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].class_id != class_id) continue;
    result.gt_indices.push_back(static_cast<int>(i));
    gt_boxes.push(gts[i].bbox);
  }
  result.num_gt = static_cast<int64_t>(result.gt_indices.size());
  result.gt_matched.assign(result.gt_indices.size(), false);

  std::vector<int> det_order;
  for (size_t i = 0; i < dets.size(); ++i)
    if (dets[i].class_id == class_id) det_order.push_back(static_cast<int>(i));
  std::stable_sort(det_order.begin(), det_order.end(), [&](int a, int b) {
    return dets[static_cast<size_t>(a)].confidence >
           dets[static_cast<size_t>(b)].confidence;
  });

  std::vector<double> ious(gt_boxes.size());
  for (int det_index : det_order) {
    const Detection& det = dets[static_cast<size_t>(det_index)];
    MatchResult::DetMatch match;
    match.det_index = det_index;
    match.confidence = det.confidence;
    if (gt_boxes.size() > 0)
      kernels::iou_one_vs_many(det.bbox, gt_boxes, ious.data());
    // Highest IoU among unmatched ground truths; ties keep the lowest index.
    int best = -1;
    double best_iou = 0.0;
    for (size_t j = 0; j < gt_boxes.size(); ++j) {
      if (result.gt_matched[j] || ious[j] < iou_thr) continue;
      if (best < 0 || ious[j] > best_iou) {
        best = static_cast<int>(j);
        best_iou = ious[j];
      }
    }
    if (best >= 0) {
      result.gt_matched[static_cast<size_t>(best)] = true;
      match.is_tp = true;
      match.gt_index = result.gt_indices[static_cast<size_t>(best)];
    }
    result.detections.push_back(match);
  }
  return result;
}

namespace {

// 101-point interpolated AP from TP flags in rank order.
double ap_from_ranked(const std::vector<char>& tp_flags, int64_t num_gt) {
  if (num_gt <= 0) return 0.0;
  const size_t n = tp_flags.size();
  if (n == 0) return 0.0;

  std::vector<double> precision(n), recall(n);
  int64_t tp = 0;
  for (size_t k = 0; k < n; ++k) {
    if (tp_flags[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  // Precision envelope: best precision at any recall >= this point.
  for (size_t k = n - 1; k-- > 0;)
    precision[k] = std::max(precision[k], precision[k + 1]);

  double ap = 0.0;
  size_t k = 0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    while (k < n && recall[k] < r) ++k;
    if (k == n) break;
    ap += precision[k];
  }
  return ap / 101.0;
}

}  // namespace

double average_precision(std::span<const Detection> dets,
                         std::span<const GroundTruthBox> gts, double iou_thr,
                         int class_id) {
  MatchResult match = match_at_iou(dets, gts, iou_thr, class_id);
  std::vector<char> flags;
  flags.reserve(match.detections.size());
  for (const auto& d : match.detections) flags.push_back(d.is_tp ? 1 : 0);
  return ap_from_ranked(flags, match.num_gt);
}

DetectionEvalReport evaluate_detection(const TeacherPredictions& preds,
                                       const DatasetManifest& truth,
                                       double conf_thr_for_pr, int jobs) {
  validate(truth);
  validate(preds);

  std::set<std::string> truth_ids;
  for (const auto& rec : truth.records) truth_ids.insert(rec.image.image_id);
  for (const auto& img : preds.images)
    if (!truth_ids.count(img.image_id))
      throw ValidationError("unknown image_id in predictions: " +
                            img.image_id);

  // Image order fixes the global ranking tie-break.
  std::vector<const ManifestRecord*> images;
  for (const auto& rec : truth.records) images.push_back(&rec);
  std::sort(images.begin(), images.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  const auto thresholds = iou_thresholds();
  const int num_classes = static_cast<int>(truth.class_map.size());
  const std::vector<Detection> no_dets;

  struct RankedDet {
    double conf;
    size_t image_order;
    int det_index;
    char tp;
  };
  // per image: [class][threshold] -> matches at that setting
  struct PerImage {
    std::vector<std::vector<std::vector<MatchResult::DetMatch>>> matches;
    std::vector<int64_t> num_gt;     // per class
    std::vector<int64_t> thr_tp;     // per class, at the PR confidence cut
    std::vector<int64_t> thr_total;  // detections above the cut
  };
  std::vector<PerImage> per_image(images.size());

  parallel_for(images.size(), jobs, [&](size_t i) {
    const ManifestRecord& rec = *images[i];
    const PredictedImage* pred = preds.find(rec.image.image_id);
    const std::vector<Detection>& dets =
        pred != nullptr ? pred->detections : no_dets;

    PerImage& out = per_image[i];
    out.matches.assign(static_cast<size_t>(num_classes), {});
    out.num_gt.assign(static_cast<size_t>(num_classes), 0);
    out.thr_tp.assign(static_cast<size_t>(num_classes), 0);
    out.thr_total.assign(static_cast<size_t>(num_classes), 0);
    for (const auto& box : rec.image.boxes)
      ++out.num_gt[static_cast<size_t>(box.class_id)];

    for (int c = 0; c < num_classes; ++c) {
      auto& by_thr = out.matches[static_cast<size_t>(c)];
      by_thr.reserve(thresholds.size());
      for (double thr : thresholds)
        by_thr.push_back(
            match_at_iou(dets, rec.image.boxes, thr, c).detections);

      // Micro precision/recall pass: cut by confidence, then match at 0.5.
      std::vector<Detection> kept;
      for (const auto& det : dets)
        if (det.class_id == c && det.confidence >= conf_thr_for_pr)
          kept.push_back(det);
      out.thr_total[static_cast<size_t>(c)] =
          static_cast<int64_t>(kept.size());
      MatchResult m = match_at_iou(kept, rec.image.boxes, 0.5, c);
      for (const auto& d : m.detections)
        if (d.is_tp) ++out.thr_tp[static_cast<size_t>(c)];
    }
  });

  DetectionEvalReport report;
  report.conf_threshold = conf_thr_for_pr;

  int64_t total_gt = 0, total_tp = 0, total_above_thr = 0;
  int classes_with_gt = 0;
  double map50_sum = 0.0, map50_95_sum = 0.0;

  for (int c = 0; c < num_classes; ++c) {
    ClassEval eval;
    eval.name = truth.class_map.name_of(c);
    for (size_t i = 0; i < images.size(); ++i) {
      eval.num_gt += per_image[i].num_gt[static_cast<size_t>(c)];
      total_tp += per_image[i].thr_tp[static_cast<size_t>(c)];
      total_above_thr += per_image[i].thr_total[static_cast<size_t>(c)];
    }
    total_gt += eval.num_gt;

    for (size_t t = 0; t < thresholds.size(); ++t) {
      std::vector<RankedDet> pooled;
      for (size_t i = 0; i < images.size(); ++i)
        for (const auto& d : per_image[i].matches[static_cast<size_t>(c)][t])
          pooled.push_back(
              {d.confidence, i, d.det_index, d.is_tp ? char{1} : char{0}});
      std::sort(pooled.begin(), pooled.end(),
                [](const RankedDet& a, const RankedDet& b) {
                  if (a.conf != b.conf) return a.conf > b.conf;
                  if (a.image_order != b.image_order)
                    return a.image_order < b.image_order;
                  return a.det_index < b.det_index;
                });
      std::vector<char> flags;
      flags.reserve(pooled.size());
      for (const auto& d : pooled) flags.push_back(d.tp);
      eval.ap_per_threshold[t] = ap_from_ranked(flags, eval.num_gt);
    }
    eval.ap50 = eval.ap_per_threshold[0];
    double sum = 0.0;
    for (double ap : eval.ap_per_threshold) sum += ap;
    eval.ap50_95 = sum / static_cast<double>(thresholds.size());

    if (eval.num_gt > 0) {
      ++classes_with_gt;
      map50_sum += eval.ap50;
      map50_95_sum += eval.ap50_95;
    }
    report.per_class.emplace(c, std::move(eval));
  }

  if (classes_with_gt > 0) {
    report.map50 = map50_sum / classes_with_gt;
    report.map50_95 = map50_95_sum / classes_with_gt;
  }

  report.tp = total_tp;
  report.fp = total_above_thr - total_tp;
  report.fn = total_gt - total_tp;
  if (total_above_thr > 0) {
    report.precision = static_cast<double>(total_tp) /
                       static_cast<double>(total_above_thr);
  } else {
    report.precision = 0.0;
    report.precision_undefined = true;
  }
  report.recall = total_gt > 0 ? static_cast<double>(total_tp) /
                                     static_cast<double>(total_gt)
                               : 0.0;
  return report;
}

ClassificationReport evaluate_classification(
    std::span<const int> pred_labels, std::span<const int> true_labels) {
  if (pred_labels.size() != true_labels.size())
    throw ValidationError("prediction/truth label count mismatch: " +
                          std::to_string(pred_labels.size()) + " vs " +
                          std::to_string(true_labels.size()));
  if (pred_labels.empty())
    throw ValidationError("cannot evaluate empty label lists");

  ClassificationReport r;
  for (size_t i = 0; i < pred_labels.size(); ++i) {
    int p = pred_labels[i], t = true_labels[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1))
      throw ValidationError("labels must be 0 or 1");
    if (p == 1 && t == 1) ++r.tp;
    else if (p == 1 && t == 0) ++r.fp;
    else if (p == 0 && t == 1) ++r.fn;
    else ++r.tn;
  }
  const double n = static_cast<double>(pred_labels.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  r.precision = (r.tp + r.fp) > 0
                    ? static_cast<double>(r.tp) /
                          static_cast<double>(r.tp + r.fp)
                    : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) /
                                     static_cast<double>(r.tp + r.fn)
                               : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

nlohmann::json to_json(const DetectionEvalReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["type"] = "detection_eval";
  j["conf_threshold"] = report.conf_threshold;
  j["map50"] = report.map50;
  j["map50_95"] = report.map50_95;
  j["precision"] = report.precision;
  j["precision_undefined"] = report.precision_undefined;
  j["recall"] = report.recall;
  j["counts"] = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}};
  nlohmann::json per_class;
  for (const auto& [cls, eval] : report.per_class) {
    nlohmann::json e;
    e["name"] = eval.name;
    e["num_gt"] = eval.num_gt;
    e["ap50"] = eval.ap50;
    e["ap50_95"] = eval.ap50_95;
    nlohmann::json curve = nlohmann::json::array();
    for (double ap : eval.ap_per_threshold) curve.push_back(ap);
    e["ap_per_iou_threshold"] = std::move(curve);
    per_class[std::to_string(cls)] = std::move(e);
  }
  j["per_class"] = std::move(per_class);
  return j;
}

nlohmann::json to_json(const ClassificationReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["type"] = "classification_eval";
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["confusion"] = {{"tp", report.tp},
                    {"fp", report.fp},
                    {"fn", report.fn},
                    {"tn", report.tn}};
  return j;
}

std::string to_text_table(const DetectionEvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s %9s %11s %10s %8s\n", "Class",
                "mAP@50", "mAP@50-95", "Precision", "Recall");
  out << line;
  std::snprintf(line, sizeof(line), "%-20s %9.3f %11.3f %10.3f %8.3f\n",
                "all", report.map50, report.map50_95, report.precision,
                report.recall);
  out << line;
  for (const auto& [cls, eval] : report.per_class) {
    std::string label = std::to_string(cls) + " " + eval.name;
    std::snprintf(line, sizeof(line), "%-20s %9.3f %11.3f %10s %8s\n",
                  label.c_str(), eval.ap50, eval.ap50_95, "-", "-");
    out << line;
  }
  if (report.precision_undefined)
    out << "note: no detections above the confidence threshold; precision "
           "reported as 0\n";
  return out.str();
}

std::string to_text_table(const ClassificationReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %10s %8s %8s\n", "Accuracy",
                "Precision", "Recall", "F1");
  out << line;
  std::snprintf(line, sizeof(line), "%-10.3f %10.3f %8.3f %8.3f\n",
                report.accuracy, report.precision, report.recall, report.f1);
  out << line;
  std::snprintf(line, sizeof(line),
                "confusion: tp=%lld fp=%lld fn=%lld tn=%lld\n",
                static_cast<long long>(report.tp),
                static_cast<long long>(report.fp),
                static_cast<long long>(report.fn),
                static_cast<long long>(report.tn));
  out << line;
  return out.str();
}

}  // namespace ssod
