#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "ssod/errors.hpp"
#include "ssod/pseudolabel.hpp"

namespace ssod {

double PseudoLabelConfig::threshold_for(int class_id) const {
  auto it = per_class_threshold.find(class_id);
  return it != per_class_threshold.end() ? it->second : default_threshold;
}

void PseudoLabelConfig::validate() const {
  auto check = [](double t) {
    if (!(t >= 0.0 && t < 1.0))
      throw ValidationError("confidence threshold must be in [0, 1)");
  };
  check(default_threshold);
  for (const auto& [cls, t] : per_class_threshold) {
    (void)cls;
    check(t);
  }
  if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0))
    throw ValidationError("min_area_fraction must be in [0, 1)");
  if (lambda_weight < 0.0)
    throw ValidationError("lambda_weight must be >= 0");
}

PseudoLabelConfig preset_yolo() {
  PseudoLabelConfig cfg;
  cfg.default_threshold = 0.5;
  return cfg;
}

PseudoLabelConfig preset_detr(const ClassMap& classes) {
  PseudoLabelConfig cfg;
  cfg.default_threshold = 0.5;
  // The hard-to-detect weed class gets a stricter threshold.
  for (const auto& c : classes.classes()) {
    std::string lower = c.name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "guinea_grass" || lower == "guinea grass" || lower == "gg")
      cfg.per_class_threshold[c.id] = 0.8;
  }
  return cfg;
}

PseudoLabelConfig preset_cls() {
  PseudoLabelConfig cfg;
  cfg.default_threshold = 0.99;
  return cfg;
}

PseudoLabelConfig preset_by_name(const std::string& name,
                                 const ClassMap& classes) {
  if (name == "yolo") return preset_yolo();
  if (name == "detr") return preset_detr(classes);
  if (name == "cls") return preset_cls();
  throw UsageError("unknown preset: " + name + " (expected yolo|detr|cls)");
}

nlohmann::json to_json(const FilterReport& report,
                       const PseudoLabelConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["type"] = "filter_report";
  nlohmann::json jc;
  jc["default_threshold"] = cfg.default_threshold;
  jc["min_area_fraction"] = cfg.min_area_fraction;
  jc["lambda_weight"] = cfg.lambda_weight;
  nlohmann::json overrides;
  for (const auto& [cls, t] : cfg.per_class_threshold)
    overrides[std::to_string(cls)] = t;
  jc["per_class_threshold"] = std::move(overrides);
  j["config"] = std::move(jc);
  nlohmann::json per_class;
  for (const auto& [cls, c] : report.per_class)
    per_class[std::to_string(cls)] = {
        {"kept", c.kept},
        {"dropped_low_confidence", c.dropped_low_confidence},
        {"dropped_small", c.dropped_small}};
  j["per_class"] = std::move(per_class);
  j["totals"] = {{"in", report.total_in},
                 {"kept", report.total_kept},
                 {"images_in", report.images_in},
                 {"images_kept", report.images_kept}};
  return j;
}

std::pair<DatasetManifest, FilterReport> filter_predictions(
    const TeacherPredictions& preds, const DatasetManifest& unlabeled,
    const PseudoLabelConfig& cfg) {
  cfg.validate();
  validate(unlabeled);
  validate(preds);
  if (!(preds.class_map == unlabeled.class_map))
    throw ValidationError("prediction class map does not match manifest");

  std::set<std::string> known_ids;
  for (const auto& rec : unlabeled.records)
    known_ids.insert(rec.image.image_id);
  for (const auto& img : preds.images)
    if (!known_ids.count(img.image_id))
      throw ValidationError("prediction for unknown image_id: " +
                            img.image_id);

  DatasetManifest out;
  out.name = unlabeled.name + "_pseudo";
  out.class_map = unlabeled.class_map;
  out.split_tag = unlabeled.split_tag;

  FilterReport report;
  for (const auto& rec : unlabeled.records) {
    const PredictedImage* img = preds.find(rec.image.image_id);
    if (img == nullptr) continue;
    report.images_in += 1;
    const double image_area =
        static_cast<double>(rec.image.width) * rec.image.height;

    ManifestRecord kept;
    kept.image.image_id = rec.image.image_id;
    kept.image.width = rec.image.width;
    kept.image.height = rec.image.height;
    kept.image.group_id = rec.image.group_id;
    kept.provenance = Provenance::pseudo;
    kept.loss_weight = cfg.lambda_weight;

    for (const auto& det : img->detections) {
      auto& cls_report = report.per_class[det.class_id];
      report.total_in += 1;
      // Confidence first; the size test only sees survivors.
      if (!(det.confidence > cfg.threshold_for(det.class_id))) {
        cls_report.dropped_low_confidence += 1;
        continue;
      }
      if (bbox_area(det.bbox) / image_area < cfg.min_area_fraction) {
        cls_report.dropped_small += 1;
        continue;
      }
      cls_report.kept += 1;
      report.total_kept += 1;
      kept.image.boxes.push_back({det.bbox, det.class_id, det.confidence});
    }
    if (!kept.image.boxes.empty()) {
      report.images_kept += 1;
      out.records.push_back(std::move(kept));
    }
  }

  sort_records(out);
  validate(out);
  return {std::move(out), std::move(report)};
}

DatasetManifest build_student_manifest(const DatasetManifest& labeled,
                                       const DatasetManifest& pseudo,
                                       double lambda_weight) {
  validate(labeled);
  validate(pseudo);
  if (lambda_weight < 0.0)
    throw ValidationError("lambda_weight must be >= 0");
  if (!(labeled.class_map == pseudo.class_map))
    throw ValidationError("class map mismatch between labeled and pseudo");

  std::set<std::string> labeled_ids;
  for (const auto& rec : labeled.records)
    labeled_ids.insert(rec.image.image_id);
  for (const auto& rec : pseudo.records)
    if (labeled_ids.count(rec.image.image_id))
      throw ValidationError("image_id collision: " + rec.image.image_id);

  DatasetManifest out;
  out.name = labeled.name + "+" + pseudo.name;
  out.class_map = labeled.class_map;
  out.split_tag = labeled.split_tag;
  out.records = labeled.records;
  for (auto rec : pseudo.records) {
    rec.provenance = Provenance::pseudo;
    rec.loss_weight = lambda_weight;
    out.records.push_back(std::move(rec));
  }
  sort_records(out);
  return out;
}

double combined_objective(std::span<const double> sup_losses,
                          std::span<const PseudoTerm> pseudo,
                          double lambda_weight, const PseudoLabelConfig& cfg) {
  if (sup_losses.empty())
    throw ValidationError("combined objective undefined with no supervised losses");

  double sup_sum = 0.0;
  for (double loss : sup_losses) sup_sum += loss;
  double result = sup_sum / static_cast<double>(sup_losses.size());

  if (!pseudo.empty()) {
    double pseudo_sum = 0.0;
    for (const auto& term : pseudo) {
      double threshold = term.class_id >= 0 ? cfg.threshold_for(term.class_id)
                                            : cfg.default_threshold;
      if (term.confidence > threshold) pseudo_sum += term.loss;
    }
    result += lambda_weight * pseudo_sum / static_cast<double>(pseudo.size());
  }
  return result;
}

}  // namespace ssod
