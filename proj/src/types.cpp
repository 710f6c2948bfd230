#include "ssod/types.hpp"

#include <algorithm>
#include <set>

#include "ssod/errors.hpp"

namespace ssod {

ClassMap::ClassMap(std::vector<ClassDef> classes)
    : classes_(std::move(classes)) {
  std::set<std::string> names;
  for (size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id != static_cast<int>(i))
      throw ValidationError("class ids must be contiguous from 0, got id " +
                            std::to_string(classes_[i].id) + " at position " +
                            std::to_string(i));
    if (classes_[i].name.empty())
      throw ValidationError("class " + std::to_string(i) + " has empty name");
    if (!names.insert(classes_[i].name).second)
      throw ValidationError("duplicate class name: " + classes_[i].name);
  }
}

bool ClassMap::contains(int class_id) const {
  return class_id >= 0 && class_id < static_cast<int>(classes_.size());
}

const std::string& ClassMap::name_of(int class_id) const {
  if (!contains(class_id))
    throw ValidationError("unknown class id " + std::to_string(class_id));
  return classes_[static_cast<size_t>(class_id)].name;
}

int ClassMap::id_of(const std::string& name) const {
  for (const auto& c : classes_)
    if (c.name == name) return c.id;
  return -1;
}

const char* to_string(Provenance p) {
  return p == Provenance::labeled ? "labeled" : "pseudo";
}

const char* to_string(SplitTag t) {
  switch (t) {
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
    default: return "unsplit";
  }
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "labeled") return Provenance::labeled;
  if (s == "pseudo") return Provenance::pseudo;
  throw ValidationError("unknown provenance: " + s);
}

SplitTag split_tag_from_string(const std::string& s) {
  if (s == "train") return SplitTag::train;
  if (s == "val") return SplitTag::val;
  if (s == "test") return SplitTag::test;
  if (s == "unsplit") return SplitTag::unsplit;
  throw ValidationError("unknown split_tag: " + s);
}

const PredictedImage* TeacherPredictions::find(
    const std::string& image_id) const {
  auto it = std::lower_bound(
      images.begin(), images.end(), image_id,
      [](const PredictedImage& p, const std::string& id) {
        return p.image_id < id;
      });
  if (it != images.end() && it->image_id == image_id) return &*it;
  return nullptr;
}

namespace {

void check_box_in_image(const BBox& b, int width, int height,
                        const std::string& image_id) {
  if (!bbox_valid(b))
    throw ValidationError("degenerate box in image " + image_id);
  if (b.x_min < 0.0 || b.y_min < 0.0 || b.x_max > width || b.y_max > height)
    throw ValidationError("box out of image bounds in image " + image_id);
}

}  // namespace

void validate(const DatasetManifest& manifest) {
  std::set<std::string> ids;
  for (const auto& rec : manifest.records) {
    const auto& img = rec.image;
    if (img.image_id.empty()) throw ValidationError("record with empty image_id");
    if (!ids.insert(img.image_id).second)
      throw ValidationError("duplicate image_id: " + img.image_id);
    if (img.width <= 0 || img.height <= 0)
      throw ValidationError("non-positive dimensions in image " + img.image_id);
    if (rec.loss_weight < 0.0)
      throw ValidationError("negative loss_weight in image " + img.image_id);
    if (rec.provenance == Provenance::labeled && rec.loss_weight != 1.0)
      throw ValidationError("labeled record must have loss_weight 1.0: " +
                            img.image_id);
    for (const auto& box : img.boxes) {
      check_box_in_image(box.bbox, img.width, img.height, img.image_id);
      if (!manifest.class_map.contains(box.class_id))
        throw ValidationError("unknown class id " +
                              std::to_string(box.class_id) + " in image " +
                              img.image_id);
      if (box.confidence &&
          (*box.confidence < 0.0 || *box.confidence > 1.0))
        throw ValidationError("confidence out of [0,1] in image " +
                              img.image_id);
    }
  }
}

void validate(const TeacherPredictions& preds) {
  std::set<std::string> ids;
  for (const auto& img : preds.images) {
    if (img.image_id.empty())
      throw ValidationError("prediction with empty image_id");
    if (!ids.insert(img.image_id).second)
      throw ValidationError("duplicate image_id in predictions: " +
                            img.image_id);
    if (img.width <= 0 || img.height <= 0)
      throw ValidationError("non-positive dimensions in prediction image " +
                            img.image_id);
    for (const auto& det : img.detections) {
      check_box_in_image(det.bbox, img.width, img.height, img.image_id);
      if (!preds.class_map.contains(det.class_id))
        throw ValidationError("unknown class id " +
                              std::to_string(det.class_id) +
                              " in prediction image " + img.image_id);
      if (det.confidence < 0.0 || det.confidence > 1.0)
        throw ValidationError("confidence out of [0,1] in prediction image " +
                              img.image_id);
    }
  }
}

void sort_records(DatasetManifest& manifest) {
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              return a.image.image_id < b.image.image_id;
            });
}

TeacherPredictions predictions_from_manifest(const DatasetManifest& manifest) {
  TeacherPredictions preds;
  preds.name = manifest.name;
  preds.class_map = manifest.class_map;
  preds.images.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    PredictedImage img;
    img.image_id = rec.image.image_id;
    img.width = rec.image.width;
    img.height = rec.image.height;
    img.group_id = rec.image.group_id;
    for (const auto& box : rec.image.boxes) {
      if (!box.confidence)
        throw ValidationError("box without confidence in image " +
                              rec.image.image_id +
                              " cannot be treated as a detection");
      img.detections.push_back({box.bbox, box.class_id, *box.confidence});
    }
    preds.images.push_back(std::move(img));
  }
  std::sort(preds.images.begin(), preds.images.end(),
            [](const PredictedImage& a, const PredictedImage& b) {
              return a.image_id < b.image_id;
            });
  return preds;
}

}  // namespace ssod
