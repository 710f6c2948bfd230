#pragma once

// Seeded random-instance generators shared by the fuzz tests.

#include <string>
#include <vector>

#include "ssod/rng.hpp"
#include "ssod/types.hpp"

namespace testgen {

inline ssod::BBox random_box(ssod::Rng& rng, double width, double height,
                             double min_side = 1.0) {
  double x0 = rng.uniform(0.0, width - min_side);
  double y0 = rng.uniform(0.0, height - min_side);
  double x1 = rng.uniform(x0 + min_side, width);
  double y1 = rng.uniform(y0 + min_side, height);
  return {x0, y0, x1, y1};
}

inline ssod::ClassMap two_classes() {
  return ssod::ClassMap({{0, "sugarcane"}, {1, "guinea_grass"}});
}

struct ManifestOptions {
  int num_images = 8;
  int max_boxes = 6;
  int width = 640;
  int height = 480;
  int num_groups = 2;
  bool with_confidence = false;
  std::string name = "gen";
};

inline ssod::DatasetManifest random_manifest(ssod::Rng& rng,
                                             const ManifestOptions& opt = {}) {
  ssod::DatasetManifest m;
  m.name = opt.name;
  m.class_map = two_classes();
  for (int i = 0; i < opt.num_images; ++i) {
    ssod::ManifestRecord rec;
    char id[32];
    std::snprintf(id, sizeof(id), "%s_%04d", opt.name.c_str(), i);
    rec.image.image_id = id;
    rec.image.width = opt.width;
    rec.image.height = opt.height;
    rec.image.group_id =
        "group_" + std::to_string(rng.below(
                       static_cast<uint64_t>(opt.num_groups)));
    int n_boxes = static_cast<int>(
        rng.below(static_cast<uint64_t>(opt.max_boxes + 1)));
    for (int b = 0; b < n_boxes; ++b) {
      ssod::GroundTruthBox box;
      box.bbox = random_box(rng, opt.width, opt.height);
      box.class_id = static_cast<int>(rng.below(2));
      if (opt.with_confidence) box.confidence = rng.uniform01();
      rec.image.boxes.push_back(box);
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

}  // namespace testgen
