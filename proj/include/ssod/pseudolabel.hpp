#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ssod/types.hpp"

namespace ssod {

struct PseudoLabelConfig {
  std::map<int, double> per_class_threshold;  // overrides, in [0, 1)
  double default_threshold = 0.5;
  double min_area_fraction = 0.0004;  // box area / image area
  double lambda_weight = 1.0;

  double threshold_for(int class_id) const;
  void validate() const;
};

// Named presets. detr raises the threshold to 0.8 for the class named
// "guinea_grass" (or "gg") when present.
PseudoLabelConfig preset_yolo();
PseudoLabelConfig preset_detr(const ClassMap& classes);
PseudoLabelConfig preset_cls();
PseudoLabelConfig preset_by_name(const std::string& name,
                                 const ClassMap& classes);

struct FilterReport {
  struct PerClass {
    int64_t kept = 0;
    int64_t dropped_low_confidence = 0;
    int64_t dropped_small = 0;
  };
  std::map<int, PerClass> per_class;
  int64_t total_in = 0;
  int64_t total_kept = 0;
  int64_t images_in = 0;
  int64_t images_kept = 0;
};

nlohmann::json to_json(const FilterReport& report,
                       const PseudoLabelConfig& cfg);

// Keeps a detection iff confidence > threshold(class) (strict) and
// area / image area >= min_area_fraction; the confidence test runs first and
// decides the drop attribution. Kept boxes become pseudo records with
// loss_weight = lambda; images with nothing kept are excluded.
std::pair<DatasetManifest, FilterReport> filter_predictions(
    const TeacherPredictions& preds, const DatasetManifest& unlabeled,
    const PseudoLabelConfig& cfg);

// Concatenates labeled + pseudo records (disjoint image ids, same class
// map); labeled weights stay 1.0, pseudo weights are set to lambda.
DatasetManifest build_student_manifest(const DatasetManifest& labeled,
                                       const DatasetManifest& pseudo,
                                       double lambda_weight);

// One pseudo-side sample of the combined objective. class_id < 0 means "use
// the default threshold".
struct PseudoTerm {
  double loss = 0.0;
  double confidence = 0.0;
  int class_id = -1;
};

// mean(sup) + lambda * (1/N_u) * sum of losses whose confidence strictly
// exceeds their class threshold; the pseudo term is 0 when N_u = 0. Throws
// when sup_losses is empty.
double combined_objective(std::span<const double> sup_losses,
                          std::span<const PseudoTerm> pseudo,
                          double lambda_weight, const PseudoLabelConfig& cfg);

}  // namespace ssod
