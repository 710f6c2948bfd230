#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json_helpers.hpp"
#include "ssod/errors.hpp"
#include "ssod/formats.hpp"

namespace ssod {

namespace {

using nlohmann::json;

json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + file.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

DatasetManifest parse_coco(const std::filesystem::path& file) {
  const json j = load_json_file(file);
  const std::string ctx = file.filename().string();
  if (!j.is_object())
    throw ValidationError(ctx + ": COCO document must be a JSON object");

  const auto& jcats = detail::require_field(j, "categories", ctx);
  const auto& jimgs = detail::require_field(j, "images", ctx);
  const auto& janns = detail::require_field(j, "annotations", ctx);
  if (!jcats.is_array() || !jimgs.is_array() || !janns.is_array())
    throw ValidationError(ctx +
                          ": images/annotations/categories must be arrays");

  // Categories keep their names; ids are remapped to 0..n-1 by ascending
  // original id.
  std::vector<std::pair<int, std::string>> cats;
  for (const auto& c : jcats)
    cats.emplace_back(detail::require_int(c, "id", ctx + " categories"),
                      detail::require_string(c, "name", ctx + " categories"));
  std::sort(cats.begin(), cats.end());
  std::map<int, int> cat_to_class;
  std::vector<ClassDef> classes;
  for (size_t i = 0; i < cats.size(); ++i) {
    if (!cat_to_class.emplace(cats[i].first, static_cast<int>(i)).second)
      throw ValidationError(ctx + ": duplicate category id " +
                            std::to_string(cats[i].first));
    classes.push_back({static_cast<int>(i), cats[i].second});
  }

  DatasetManifest manifest;
  manifest.name = file.stem().string();
  manifest.class_map = ClassMap(std::move(classes));
  manifest.split_tag = SplitTag::unsplit;

  std::map<int, size_t> image_index;
  for (const auto& im : jimgs) {
    int id = detail::require_int(im, "id", ctx + " images");
    ManifestRecord rec;
    rec.image.image_id =
        std::filesystem::path(
            detail::require_string(im, "file_name", ctx + " images"))
            .stem()
            .string();
    rec.image.width = detail::require_int(im, "width", ctx + " images");
    rec.image.height = detail::require_int(im, "height", ctx + " images");
    if (!image_index.emplace(id, manifest.records.size()).second)
      throw ValidationError(ctx + ": duplicate image id " +
                            std::to_string(id));
    manifest.records.push_back(std::move(rec));
  }

  std::vector<int> dangling_images, dangling_cats;
  for (const auto& an : janns) {
    const std::string actx = ctx + " annotation " +
                             std::to_string(detail::require_int(an, "id", ctx));
    int image_id = detail::require_int(an, "image_id", actx);
    int category_id = detail::require_int(an, "category_id", actx);
    auto img_it = image_index.find(image_id);
    auto cat_it = cat_to_class.find(category_id);
    if (img_it == image_index.end()) dangling_images.push_back(image_id);
    if (cat_it == cat_to_class.end()) dangling_cats.push_back(category_id);
    if (img_it == image_index.end() || cat_it == cat_to_class.end()) continue;

    const auto& jb = detail::require_field(an, "bbox", actx);
    if (!jb.is_array() || jb.size() != 4)
      throw ValidationError(actx + ": bbox must be [x, y, width, height]");
    double x = jb[0].get<double>(), y = jb[1].get<double>();
    double w = jb[2].get<double>(), h = jb[3].get<double>();
    if (w <= 0.0 || h <= 0.0)
      throw ValidationError(actx + ": bbox width/height must be positive");
    manifest.records[img_it->second].image.boxes.push_back(
        {BBox{x, y, x + w, y + h}, cat_it->second, std::nullopt});
  }

  if (!dangling_images.empty() || !dangling_cats.empty()) {
    std::string msg = ctx + ": dangling references;";
    if (!dangling_images.empty()) {
      msg += " image_ids:";
      for (int id : dangling_images) msg += " " + std::to_string(id);
    }
    if (!dangling_cats.empty()) {
      msg += " category_ids:";
      for (int id : dangling_cats) msg += " " + std::to_string(id);
    }
    throw ValidationError(msg);
  }

  sort_records(manifest);
  validate(manifest);
  return manifest;
}

void write_coco(const DatasetManifest& manifest,
                const std::filesystem::path& file) {
  validate(manifest);

  std::vector<const ManifestRecord*> ordered;
  for (const auto& rec : manifest.records) ordered.push_back(&rec);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  json j;
  json jcats = json::array();
  for (const auto& c : manifest.class_map.classes())
    jcats.push_back({{"id", c.id + 1}, {"name", c.name}});
  j["categories"] = std::move(jcats);

  json jimgs = json::array();
  json janns = json::array();
  int ann_id = 1;
  for (size_t i = 0; i < ordered.size(); ++i) {
    const auto& img = ordered[i]->image;
    int coco_image_id = static_cast<int>(i) + 1;
    jimgs.push_back({{"id", coco_image_id},
                     {"file_name", img.image_id + ".jpg"},
                     {"width", img.width},
                     {"height", img.height}});
    for (const auto& box : img.boxes) {
      janns.push_back(
          {{"id", ann_id++},
           {"image_id", coco_image_id},
           {"category_id", box.class_id + 1},
           {"bbox",
            {box.bbox.x_min, box.bbox.y_min, box.bbox.x_max - box.bbox.x_min,
             box.bbox.y_max - box.bbox.y_min}},
           {"area", bbox_area(box.bbox)},
           {"iscrowd", 0}});
    }
  }
  j["images"] = std::move(jimgs);
  j["annotations"] = std::move(janns);

  if (file.has_parent_path())
    std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace ssod
