#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ssod/errors.hpp"
#include "ssod/kernels.hpp"
#include "ssod/metrics.hpp"
#include "ssod/parallel.hpp"
#include "ssod/pseudolabel.hpp"
#include "ssod/rng.hpp"
#include "ssod/synth.hpp"

namespace ssod {

namespace {

constexpr int kPlacementAttempts = 1000;

uint8_t intensity_byte(double v) {
  return static_cast<uint8_t>(std::lround(v * 255.0));
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError(std::string(what) + " must be in [0, 1]");
}

struct IntRect {
  int x0, y0, x1, y1;  // half-open

  BBox to_bbox() const {
    return {static_cast<double>(x0), static_cast<double>(y0),
            static_cast<double>(x1), static_cast<double>(y1)};
  }
};

// Rejection-sampled non-overlapping rectangle, or throws after the attempt
// budget.
IntRect place_rect(Rng& rng, int width, int height, double min_frac,
                   double max_frac, const std::vector<IntRect>& placed,
                   const std::string& image_id) {
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    double fw = rng.uniform(min_frac, max_frac);
    double fh = rng.uniform(min_frac, max_frac);
    int bw = std::clamp(static_cast<int>(std::lround(fw * width)), 1, width);
    int bh = std::clamp(static_cast<int>(std::lround(fh * height)), 1, height);
    int x0 = static_cast<int>(rng.below(static_cast<uint64_t>(width - bw + 1)));
    int y0 =
        static_cast<int>(rng.below(static_cast<uint64_t>(height - bh + 1)));
    IntRect rect{x0, y0, x0 + bw, y0 + bh};
    bool overlaps = false;
    for (const auto& other : placed) {
      if (rect.x0 < other.x1 && other.x0 < rect.x1 && rect.y0 < other.y1 &&
          other.y0 < rect.y1) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) return rect;
  }
  throw ValidationError("unable to place a non-overlapping box in image " +
                        image_id + " after " +
                        std::to_string(kPlacementAttempts) + " attempts");
}

void fill_rect(GrayImage& image, const IntRect& rect, uint8_t value) {
  for (int y = rect.y0; y < rect.y1; ++y)
    std::fill(image.pixels.begin() + static_cast<size_t>(y) * image.width +
                  rect.x0,
              image.pixels.begin() + static_cast<size_t>(y) * image.width +
                  rect.x1,
              value);
}

}  // namespace

ClassMap SceneConfig::class_map() const {
  std::vector<SceneClassSpec> ordered = classes;
  std::sort(ordered.begin(), ordered.end(),
            [](const SceneClassSpec& a, const SceneClassSpec& b) {
              return a.cls.id < b.cls.id;
            });
  std::vector<ClassDef> defs;
  for (const auto& spec : ordered) defs.push_back(spec.cls);
  return ClassMap(std::move(defs));
}

void SceneConfig::validate() const {
  class_map();  // checks ids/names
  if (num_images < 0 || num_images > 999999)
    throw ValidationError("num_images must be in [0, 999999]");
  if (width < 1 || height < 1)
    throw ValidationError("scene dimensions must be positive");
  if (!(box_min_frac > 0.0 && box_min_frac <= box_max_frac &&
        box_max_frac <= 1.0))
    throw ValidationError("box size fractions must satisfy 0 < min <= max <= 1");
  check_unit(background_intensity, "background_intensity");
  check_unit(shadow_intensity, "shadow_intensity");
  check_unit(shadow_rate, "shadow_rate");
  if (name.empty()) throw ValidationError("scene name must not be empty");
  std::set<long> intensities;
  for (const auto& spec : classes) {
    check_unit(spec.intensity, "class intensity");
    if (spec.min_boxes < 0 || spec.max_boxes < spec.min_boxes)
      throw ValidationError("box count range invalid for class " +
                            spec.cls.name);
    // Distinct after quantization to raster bytes.
    if (!intensities.insert(std::lround(spec.intensity * 255.0)).second)
      throw ValidationError("class intensities must be distinct");
  }
}

SceneOutput generate_scenes(const SceneConfig& cfg, int jobs) {
  cfg.validate();
  const ClassMap class_map = cfg.class_map();

  std::vector<SceneClassSpec> ordered = cfg.classes;
  std::sort(ordered.begin(), ordered.end(),
            [](const SceneClassSpec& a, const SceneClassSpec& b) {
              return a.cls.id < b.cls.id;
            });

  std::vector<ManifestRecord> records(
      static_cast<size_t>(cfg.num_images));
  std::vector<GrayImage> rasters(static_cast<size_t>(cfg.num_images));

  parallel_for(static_cast<size_t>(cfg.num_images), jobs, [&](size_t i) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%06zu", i);
    const std::string image_id = cfg.name + suffix;

    Rng rng(Rng::derive(cfg.seed, i));
    GrayImage image;
    image.width = cfg.width;
    image.height = cfg.height;
    image.pixels.assign(
        static_cast<size_t>(cfg.width) * static_cast<size_t>(cfg.height),
        intensity_byte(cfg.background_intensity));

    ManifestRecord rec;
    rec.image.image_id = image_id;
    rec.image.width = cfg.width;
    rec.image.height = cfg.height;
    rec.image.group_id = cfg.group_id;

    std::vector<IntRect> placed;
    for (const auto& spec : ordered) {
      const int span = spec.max_boxes - spec.min_boxes + 1;
      const int count =
          spec.min_boxes +
          static_cast<int>(rng.below(static_cast<uint64_t>(span)));
      for (int b = 0; b < count; ++b) {
        IntRect rect = place_rect(rng, cfg.width, cfg.height, cfg.box_min_frac,
                                  cfg.box_max_frac, placed, image_id);
        placed.push_back(rect);
        fill_rect(image, rect, intensity_byte(spec.intensity));
        rec.image.boxes.push_back(
            {rect.to_bbox(), spec.cls.id, std::nullopt});
      }
    }
    // Shadow distractor: drawn into the raster, never into the ground truth.
    if (rng.uniform01() < cfg.shadow_rate) {
      IntRect rect = place_rect(rng, cfg.width, cfg.height, cfg.box_min_frac,
                                cfg.box_max_frac, placed, image_id);
      fill_rect(image, rect, intensity_byte(cfg.shadow_intensity));
    }

    records[i] = std::move(rec);
    rasters[i] = std::move(image);
  });

  SceneOutput out;
  out.manifest.name = cfg.name;
  out.manifest.class_map = class_map;
  out.manifest.split_tag = SplitTag::unsplit;
  for (size_t i = 0; i < records.size(); ++i) {
    out.rasters.emplace(records[i].image.image_id, std::move(rasters[i]));
    out.manifest.records.push_back(std::move(records[i]));
  }
  validate(out.manifest);
  return out;
}

void MockTeacherConfig::validate() const {
  check_unit(miss_rate, "miss_rate");
  if (false_positive_rate < 0.0)
    throw ValidationError("false_positive_rate must be >= 0");
  if (!(0.0 <= tp_conf_lo && tp_conf_lo <= tp_conf_hi && tp_conf_hi <= 1.0))
    throw ValidationError("tp confidence range invalid");
  if (!(0.0 <= fp_conf_lo && fp_conf_lo <= fp_conf_hi && fp_conf_hi <= 1.0))
    throw ValidationError("fp confidence range invalid");
  if (jitter_sigma < 0.0) throw ValidationError("jitter sigma must be >= 0");
  if (!(fp_box_min_frac > 0.0 && fp_box_min_frac <= fp_box_max_frac &&
        fp_box_max_frac <= 1.0))
    throw ValidationError("fp box size fractions invalid");
}

TeacherPredictions mock_teacher(const DatasetManifest& truth,
                                const MockTeacherConfig& cfg) {
  cfg.validate();
  validate(truth);

  std::vector<const ManifestRecord*> ordered;
  for (const auto& rec : truth.records) ordered.push_back(&rec);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  TeacherPredictions preds;
  preds.name = truth.name + "_teacher";
  preds.class_map = truth.class_map;
  preds.images.resize(ordered.size());

  const int num_classes = static_cast<int>(truth.class_map.size());
  for (size_t i = 0; i < ordered.size(); ++i) {
    const ImageRecord& img = ordered[i]->image;
    Rng rng(Rng::derive(cfg.seed, i));

    PredictedImage out;
    out.image_id = img.image_id;
    out.width = img.width;
    out.height = img.height;
    out.group_id = img.group_id;

    const double w = img.width, h = img.height;
    for (const auto& gt : img.boxes) {
      if (rng.uniform01() < cfg.miss_rate) continue;
      BBox box{gt.bbox.x_min + rng.normal(cfg.jitter_sigma),
               gt.bbox.y_min + rng.normal(cfg.jitter_sigma),
               gt.bbox.x_max + rng.normal(cfg.jitter_sigma),
               gt.bbox.y_max + rng.normal(cfg.jitter_sigma)};
      box.x_min = std::clamp(box.x_min, 0.0, w);
      box.y_min = std::clamp(box.y_min, 0.0, h);
      box.x_max = std::clamp(box.x_max, 0.0, w);
      box.y_max = std::clamp(box.y_max, 0.0, h);
      if (!bbox_valid(box)) box = gt.bbox;  // jitter collapsed the box
      out.detections.push_back(
          {box, gt.class_id, rng.uniform(cfg.tp_conf_lo, cfg.tp_conf_hi)});
    }

    const uint64_t spurious = rng.poisson(cfg.false_positive_rate);
    for (uint64_t s = 0; s < spurious; ++s) {
      int class_id =
          num_classes > 0
              ? static_cast<int>(rng.below(static_cast<uint64_t>(num_classes)))
              : 0;
      double fw = rng.uniform(cfg.fp_box_min_frac, cfg.fp_box_max_frac);
      double fh = rng.uniform(cfg.fp_box_min_frac, cfg.fp_box_max_frac);
      int bw = std::clamp(static_cast<int>(std::lround(fw * w)), 1, img.width);
      int bh =
          std::clamp(static_cast<int>(std::lround(fh * h)), 1, img.height);
      int x0 =
          static_cast<int>(rng.below(static_cast<uint64_t>(img.width - bw + 1)));
      int y0 = static_cast<int>(
          rng.below(static_cast<uint64_t>(img.height - bh + 1)));
      out.detections.push_back(
          {BBox{static_cast<double>(x0), static_cast<double>(y0),
                static_cast<double>(x0 + bw), static_cast<double>(y0 + bh)},
           class_id, rng.uniform(cfg.fp_conf_lo, cfg.fp_conf_hi)});
    }

    preds.images[i] = std::move(out);
  }
  validate(preds);
  return preds;
}

std::vector<Detection> toy_detect(const GrayImage& image, double theta,
                                  int target_class) {
  std::vector<Detection> detections;
  const double cutoff = theta * 255.0;
  if (cutoff > 255.0) return detections;
  const uint8_t threshold =
      cutoff <= 0.0 ? 0 : static_cast<uint8_t>(std::ceil(cutoff));

  const size_t n = image.pixels.size();
  std::vector<uint8_t> mask(n);
  kernels::mask_ge_u8(image.pixels.data(), n, threshold, mask.data());

  // 4-connected components in scan order; each becomes one detection.
  const int w = image.width, h = image.height;
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      if (!mask[idx]) continue;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      mask[idx] = 0;
      stack.clear();
      stack.push_back(static_cast<int>(idx));
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int px = p % w, py = p / w;
        x0 = std::min(x0, px);
        x1 = std::max(x1, px);
        y0 = std::min(y0, py);
        y1 = std::max(y1, py);
        const int neighbors[4][2] = {
            {px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}};
        for (const auto& nb : neighbors) {
          if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
          const size_t nidx = static_cast<size_t>(nb[1]) * w + nb[0];
          if (!mask[nidx]) continue;
          mask[nidx] = 0;
          stack.push_back(static_cast<int>(nidx));
        }
      }
      detections.push_back({BBox{static_cast<double>(x0),
                                 static_cast<double>(y0),
                                 static_cast<double>(x1 + 1),
                                 static_cast<double>(y1 + 1)},
                            target_class, 1.0});
    }
  }
  return detections;
}

namespace {

struct ImageCounts {
  int64_t tp = 0, fp = 0, fn = 0;
};

ImageCounts toy_image_counts(const ImageRecord& image, const GrayImage& raster,
                             double theta, int target_class) {
  std::vector<Detection> dets = toy_detect(raster, theta, target_class);
  MatchResult m = match_at_iou(dets, image.boxes, 0.5, target_class);
  ImageCounts counts;
  for (const auto& d : m.detections) d.is_tp ? ++counts.tp : ++counts.fp;
  counts.fn = m.num_gt - counts.tp;
  return counts;
}

double loss_from_counts(const ImageCounts& c) {
  const int64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 0.0;  // nothing to find, nothing found
  return 1.0 - 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

const GrayImage& raster_for(const RasterSet& rasters,
                            const std::string& image_id) {
  auto it = rasters.find(image_id);
  if (it == rasters.end())
    throw ValidationError("no raster for image " + image_id);
  return it->second;
}

}  // namespace

double toy_detector_loss(const DatasetManifest& manifest,
                         const RasterSet& rasters, double theta,
                         int target_class, int jobs) {
  validate(manifest);
  std::vector<const ManifestRecord*> ordered;
  for (const auto& rec : manifest.records) ordered.push_back(&rec);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  std::vector<ImageCounts> counts(ordered.size());
  parallel_for(ordered.size(), jobs, [&](size_t i) {
    counts[i] =
        toy_image_counts(ordered[i]->image,
                         raster_for(rasters, ordered[i]->image.image_id),
                         theta, target_class);
  });
  ImageCounts total;
  for (const auto& c : counts) {
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  return loss_from_counts(total);
}

ToyFitResult fit_toy_detector(const DatasetManifest& train,
                              const RasterSet& rasters,
                              std::span<const double> param_grid,
                              int target_class, int jobs) {
  validate(train);
  if (train.records.empty()) throw ValidationError("empty training set");
  if (param_grid.empty()) throw ValidationError("empty parameter grid");
  if (!train.class_map.contains(target_class))
    throw ValidationError("unknown target class " +
                          std::to_string(target_class));

  std::vector<const ManifestRecord*> labeled, pseudo;
  for (const auto& rec : train.records)
    (rec.provenance == Provenance::labeled ? labeled : pseudo).push_back(&rec);
  auto by_id = [](const ManifestRecord* a, const ManifestRecord* b) {
    return a->image.image_id < b->image.image_id;
  };
  std::sort(labeled.begin(), labeled.end(), by_id);
  std::sort(pseudo.begin(), pseudo.end(), by_id);

  double lambda = 0.0;
  if (!pseudo.empty()) {
    lambda = pseudo.front()->loss_weight;
    for (const ManifestRecord* rec : pseudo)
      if (rec->loss_weight != lambda)
        throw ValidationError("pseudo records carry non-uniform loss weights");
  }

  // Pre-resolve rasters so a missing file fails before the grid sweep.
  std::vector<const ManifestRecord*> all(labeled);
  all.insert(all.end(), pseudo.begin(), pseudo.end());
  for (const ManifestRecord* rec : all)
    raster_for(rasters, rec->image.image_id);

  std::vector<double> grid(param_grid.begin(), param_grid.end());
  std::sort(grid.begin(), grid.end());

  const PseudoLabelConfig objective_cfg;  // pseudo terms enter with conf 1.0
  ToyFitResult result;
  result.best_loss = std::numeric_limits<double>::infinity();

  std::vector<double> losses(all.size());
  for (double theta : grid) {
    parallel_for(all.size(), jobs, [&](size_t i) {
      losses[i] = loss_from_counts(
          toy_image_counts(all[i]->image,
                           raster_for(rasters, all[i]->image.image_id), theta,
                           target_class));
    });
    std::span<const double> sup(losses.data(), labeled.size());
    std::vector<PseudoTerm> pseudo_terms;
    pseudo_terms.reserve(pseudo.size());
    for (size_t i = labeled.size(); i < all.size(); ++i)
      pseudo_terms.push_back({losses[i], 1.0, -1});
    const double objective =
        combined_objective(sup, pseudo_terms, lambda, objective_cfg);
    result.grid_losses.emplace_back(theta, objective);
    if (objective < result.best_loss) {  // ties keep the smallest theta
      result.best_loss = objective;
      result.best_param = theta;
    }
  }
  return result;
}

}  // namespace ssod
