#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssod/pgm.hpp"
#include "ssod/types.hpp"

namespace ssod {

struct SceneClassSpec {
  ClassDef cls;
  double intensity = 0.5;  // fill value in [0, 1]; must be distinct per class
  int min_boxes = 0;
  int max_boxes = 0;
};

struct SceneConfig {
  uint64_t seed = 0;
  int num_images = 0;
  int width = 0;
  int height = 0;
  std::vector<SceneClassSpec> classes;
  double box_min_frac = 0.05;  // box side as a fraction of the image side
  double box_max_frac = 0.2;
  double background_intensity = 0.2;
  double shadow_rate = 0.0;  // fraction of images with a dark distractor
  double shadow_intensity = 0.05;
  std::string name = "synth";
  std::string group_id = "synth";

  void validate() const;
  ClassMap class_map() const;
};

struct SceneOutput {
  DatasetManifest manifest;
  RasterSet rasters;
};

// Deterministic given the seed; images are generated from per-image derived
// seeds so any parallel schedule agrees with the serial run. Boxes are
// placed by rejection sampling (<= 1000 attempts each, then error) and never
// overlap. Shadow rectangles are drawn into the raster but carry no
// ground-truth box.
SceneOutput generate_scenes(const SceneConfig& cfg, int jobs = 1);

struct MockTeacherConfig {
  double miss_rate = 0.0;            // per ground-truth box
  double false_positive_rate = 0.0;  // Poisson mean per image
  double tp_conf_lo = 0.6, tp_conf_hi = 1.0;
  double fp_conf_lo = 0.0, fp_conf_hi = 0.7;
  double jitter_sigma = 0.0;  // pixels, per box edge
  double fp_box_min_frac = 0.05, fp_box_max_frac = 0.3;
  uint64_t seed = 0;

  void validate() const;
};

// Emits each GT box with probability 1 - miss_rate (jittered, clamped to the
// image, confidence uniform in the TP range), plus Poisson(fp_rate) spurious
// boxes per image with confidence in the FP range.
TeacherPredictions mock_teacher(const DatasetManifest& truth,
                                const MockTeacherConfig& cfg);

// Intensity-threshold detector: pixels >= theta * 255 are foreground; each
// 4-connected component becomes one detection of target_class (confidence 1).
std::vector<Detection> toy_detect(const GrayImage& image, double theta,
                                  int target_class);

// Micro 1 - F1 at IoU 0.5 over the whole manifest (empty vs empty scores as
// a perfect image).
double toy_detector_loss(const DatasetManifest& manifest,
                         const RasterSet& rasters, double theta,
                         int target_class, int jobs = 1);

struct ToyFitResult {
  double best_param = 0.0;
  double best_loss = 0.0;
  std::vector<std::pair<double, double>> grid_losses;  // (param, loss)
};

// Exact grid search for the threshold parameter; ties resolve to the
// smallest theta. The objective is the weighted combination of per-image
// losses: labeled records form the supervised mean, pseudo records enter
// with their (uniform) loss_weight as lambda.
ToyFitResult fit_toy_detector(const DatasetManifest& train,
                              const RasterSet& rasters,
                              std::span<const double> param_grid,
                              int target_class, int jobs = 1);

}  // namespace ssod
