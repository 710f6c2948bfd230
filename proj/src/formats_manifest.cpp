#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include "json_helpers.hpp"
#include "ssod/errors.hpp"
#include "ssod/formats.hpp"

namespace ssod {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

const std::set<std::string> kTopKeys = {"schema_version", "name", "split_tag",
                                        "classes", "records"};
const std::set<std::string> kRecordKeys = {"image_id", "group_id", "width",
                                           "height",   "provenance",
                                           "loss_weight", "boxes"};
const std::set<std::string> kBoxKeys = {"class_id", "x_min", "y_min",
                                        "x_max",    "y_max", "confidence"};

// Strict mode rejects unknown keys; lenient mode returns them for
// round-tripping.
json collect_extras(const json& j, const std::set<std::string>& known,
                    bool strict, const std::string& ctx) {
  json extras = json::object();
  for (const auto& [key, value] : j.items()) {
    if (known.count(key)) continue;
    if (strict)
      throw ValidationError(ctx + ": unknown field '" + key + "'");
    extras[key] = value;
  }
  return extras;
}

GroundTruthBox parse_box(const json& jb, bool strict, const std::string& ctx) {
  if (!jb.is_object()) throw ValidationError(ctx + ": box must be an object");
  if (strict) collect_extras(jb, kBoxKeys, true, ctx);
  GroundTruthBox box;
  box.class_id = detail::require_int(jb, "class_id", ctx);
  box.bbox.x_min = detail::require_double(jb, "x_min", ctx);
  box.bbox.y_min = detail::require_double(jb, "y_min", ctx);
  box.bbox.x_max = detail::require_double(jb, "x_max", ctx);
  box.bbox.y_max = detail::require_double(jb, "y_max", ctx);
  if (auto it = jb.find("confidence"); it != jb.end()) {
    if (!it->is_number())
      throw ValidationError(ctx + ": confidence must be a number");
    box.confidence = it->get<double>();
  }
  return box;
}

json box_to_json(const GroundTruthBox& box) {
  json jb{{"class_id", box.class_id},
          {"x_min", box.bbox.x_min},
          {"y_min", box.bbox.y_min},
          {"x_max", box.bbox.x_max},
          {"y_max", box.bbox.y_max}};
  if (box.confidence) jb["confidence"] = *box.confidence;
  return jb;
}

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

void dump_json_file(const json& j, const std::filesystem::path& file) {
  if (file.has_parent_path())
    std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace

DatasetManifest parse_manifest(const std::filesystem::path& file,
                               bool strict) {
  const json j = load_json_file(file);
  const std::string ctx = file.filename().string();
  if (!j.is_object())
    throw ValidationError(ctx + ": manifest must be a JSON object");

  auto version_it = j.find("schema_version");
  if (version_it == j.end() || !version_it->is_number_integer() ||
      version_it->get<int>() != kSchemaVersion)
    throw ValidationError(
        ctx + ": schema-version mismatch (expected " +
        std::to_string(kSchemaVersion) + ")");

  DatasetManifest manifest;
  manifest.extra = collect_extras(j, kTopKeys, strict, ctx);
  manifest.name = detail::require_string(j, "name", ctx);
  manifest.split_tag =
      split_tag_from_string(detail::require_string(j, "split_tag", ctx));

  const auto& jc = detail::require_field(j, "classes", ctx);
  if (!jc.is_array())
    throw ValidationError(ctx + ": 'classes' must be an array");
  std::vector<ClassDef> classes;
  for (const auto& c : jc)
    classes.push_back({detail::require_int(c, "id", ctx + " classes"),
                       detail::require_string(c, "name", ctx + " classes")});
  manifest.class_map = ClassMap(std::move(classes));

  const auto& jr = detail::require_field(j, "records", ctx);
  if (!jr.is_array())
    throw ValidationError(ctx + ": 'records' must be an array");
  for (const auto& r : jr) {
    ManifestRecord rec;
    const std::string rctx =
        ctx + " record '" +
        (r.contains("image_id") && r["image_id"].is_string()
             ? r["image_id"].get<std::string>()
             : std::string("?")) +
        "'";
    rec.extra = collect_extras(r, kRecordKeys, strict, rctx);
    rec.image.image_id = detail::require_string(r, "image_id", rctx);
    rec.image.group_id = detail::require_string(r, "group_id", rctx);
    rec.image.width = detail::require_int(r, "width", rctx);
    rec.image.height = detail::require_int(r, "height", rctx);
    rec.provenance = provenance_from_string(
        detail::require_string(r, "provenance", rctx));
    rec.loss_weight = detail::require_double(r, "loss_weight", rctx);
    const auto& boxes = detail::require_field(r, "boxes", rctx);
    if (!boxes.is_array())
      throw ValidationError(rctx + ": 'boxes' must be an array");
    for (const auto& jb : boxes)
      rec.image.boxes.push_back(parse_box(jb, strict, rctx));
    manifest.records.push_back(std::move(rec));
  }

  validate(manifest);
  return manifest;
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& file) {
  validate(manifest);

  std::vector<const ManifestRecord*> ordered;
  ordered.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) ordered.push_back(&rec);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  json j;
  if (manifest.extra.is_object()) j = manifest.extra;
  j["schema_version"] = kSchemaVersion;
  j["name"] = manifest.name;
  j["split_tag"] = to_string(manifest.split_tag);
  json jc = json::array();
  for (const auto& c : manifest.class_map.classes())
    jc.push_back({{"id", c.id}, {"name", c.name}});
  j["classes"] = std::move(jc);

  json jr = json::array();
  for (const ManifestRecord* rec : ordered) {
    json r;
    if (rec->extra.is_object()) r = rec->extra;
    r["image_id"] = rec->image.image_id;
    r["group_id"] = rec->image.group_id;
    r["width"] = rec->image.width;
    r["height"] = rec->image.height;
    r["provenance"] = to_string(rec->provenance);
    r["loss_weight"] = rec->loss_weight;
    json boxes = json::array();
    for (const auto& box : rec->image.boxes) boxes.push_back(box_to_json(box));
    r["boxes"] = std::move(boxes);
    jr.push_back(std::move(r));
  }
  j["records"] = std::move(jr);

  dump_json_file(j, file);
}

TeacherPredictions parse_predictions(const std::filesystem::path& file) {
  DatasetManifest manifest = parse_manifest(file, /*strict=*/false);
  TeacherPredictions preds = predictions_from_manifest(manifest);
  validate(preds);
  return preds;
}

void write_predictions(const TeacherPredictions& preds,
                       const std::filesystem::path& file) {
  validate(preds);
  DatasetManifest manifest;
  manifest.name = preds.name;
  manifest.class_map = preds.class_map;
  manifest.split_tag = SplitTag::unsplit;
  for (const auto& img : preds.images) {
    ManifestRecord rec;
    rec.image.image_id = img.image_id;
    rec.image.width = img.width;
    rec.image.height = img.height;
    rec.image.group_id = img.group_id;
    for (const auto& det : img.detections)
      rec.image.boxes.push_back({det.bbox, det.class_id, det.confidence});
    rec.provenance = Provenance::pseudo;
    rec.loss_weight = 1.0;
    manifest.records.push_back(std::move(rec));
  }
  write_manifest(manifest, file);
}

}  // namespace ssod
