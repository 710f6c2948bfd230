#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssod/bbox.hpp"

namespace ssod {

struct ClassDef {
  int id = 0;
  std::string name;

  bool operator==(const ClassDef&) const = default;
};

// Ordered class set; ids contiguous from 0, names unique and non-empty.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::vector<ClassDef> classes);

  const std::vector<ClassDef>& classes() const { return classes_; }
  size_t size() const { return classes_.size(); }
  bool contains(int class_id) const;
  const std::string& name_of(int class_id) const;
  // -1 when no class carries the name.
  int id_of(const std::string& name) const;

  bool operator==(const ClassMap&) const = default;

 private:
  std::vector<ClassDef> classes_;
};

// Annotation box. `confidence` is absent on hand-labeled boxes and carries
// the teacher score on pseudo-label boxes so filtering stays idempotent.
struct GroundTruthBox {
  BBox bbox;
  int class_id = 0;
  std::optional<double> confidence;
};

struct Detection {
  BBox bbox;
  int class_id = 0;
  double confidence = 0.0;
};

struct ImageRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::string group_id;  // paddock identifier
  std::vector<GroundTruthBox> boxes;
};

enum class Provenance { labeled, pseudo };
enum class SplitTag { train, val, test, unsplit };

const char* to_string(Provenance p);
const char* to_string(SplitTag t);
Provenance provenance_from_string(const std::string& s);
SplitTag split_tag_from_string(const std::string& s);

struct ManifestRecord {
  ImageRecord image;
  Provenance provenance = Provenance::labeled;
  double loss_weight = 1.0;
  nlohmann::json extra;  // unknown fields preserved by the lenient parser
};

struct DatasetManifest {
  std::string name;
  ClassMap class_map;
  std::vector<ManifestRecord> records;
  SplitTag split_tag = SplitTag::unsplit;
  nlohmann::json extra;
};

// Teacher output for one image; dimensions copied from the source manifest
// so prediction files are self-contained.
struct PredictedImage {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::string group_id;
  std::vector<Detection> detections;
};

struct TeacherPredictions {
  std::string name;
  ClassMap class_map;
  std::vector<PredictedImage> images;  // sorted by image_id

  const PredictedImage* find(const std::string& image_id) const;
};

// Throws ValidationError naming the offending record on any violation:
// duplicate image_ids, out-of-bounds or degenerate boxes, unknown class ids,
// negative weights, labeled records with weight != 1.
void validate(const DatasetManifest& manifest);

// Boxes in-bounds and valid, classes known, confidences in [0, 1].
void validate(const TeacherPredictions& preds);

// Records ordered by image_id; the canonical on-disk order.
void sort_records(DatasetManifest& manifest);

// Treat a manifest's boxes as detections. Every box must carry a confidence.
TeacherPredictions predictions_from_manifest(const DatasetManifest& manifest);

}  // namespace ssod
