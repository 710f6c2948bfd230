#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "ssod/types.hpp"

namespace ssod {

// image_id -> (width, height). Sidecar for YOLO label dirs, which do not
// carry image dimensions.
using DimsTable = std::map<std::string, std::pair<int, int>>;

// CSV lines `image_id,width,height`; a leading header row is skipped.
DimsTable parse_dims_csv(const std::filesystem::path& file);

// One `<image_id>.txt` per image, lines `class cx cy w h` normalized to
// [0,1]. Malformed lines fail with file and line number; nothing is dropped
// silently.
DatasetManifest parse_yolo_dir(const std::filesystem::path& label_dir,
                               const DimsTable& dims, const ClassMap& classes,
                               const std::string& name);
void write_yolo_dir(const DatasetManifest& manifest,
                    const std::filesystem::path& out_dir);

// Single JSON document with images/annotations/categories; bbox is absolute
// [x, y, width, height]. Categories map onto class ids by ascending id.
DatasetManifest parse_coco(const std::filesystem::path& file);
void write_coco(const DatasetManifest& manifest,
                const std::filesystem::path& file);

// Native manifest: schema_version, name, split_tag, classes, records with
// group_id/provenance/loss_weight (and confidence on pseudo boxes). Lossless.
// strict=true rejects unknown fields; otherwise they round-trip via `extra`.
DatasetManifest parse_manifest(const std::filesystem::path& file,
                               bool strict = false);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& file);

// Prediction files reuse the manifest schema with a required per-box
// confidence.
TeacherPredictions parse_predictions(const std::filesystem::path& file);
void write_predictions(const TeacherPredictions& preds,
                       const std::filesystem::path& file);

}  // namespace ssod
