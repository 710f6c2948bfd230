#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssod/errors.hpp"
#include "ssod/kernels.hpp"
#include "ssod/quadrant.hpp"

namespace ssod {

const char* to_string(QuadrantIndex q) {
  switch (q) {
    case QuadrantIndex::TL: return "TL";
    case QuadrantIndex::TR: return "TR";
    case QuadrantIndex::BL: return "BL";
    default: return "BR";
  }
}

QuadrantIndex quadrant_from_string(const std::string& s) {
  if (s == "TL") return QuadrantIndex::TL;
  if (s == "TR") return QuadrantIndex::TR;
  if (s == "BL") return QuadrantIndex::BL;
  if (s == "BR") return QuadrantIndex::BR;
  throw ValidationError("unknown quadrant: " + s);
}

std::array<QuadrantRegion, 4> split_quadrants(const ImageRecord& record) {
  if (record.width < 2 || record.height < 2)
    throw ValidationError("image too small to split: " + record.image_id);
  const double w = record.width, h = record.height;
  const double mx = std::floor(record.width / 2.0);
  const double my = std::floor(record.height / 2.0);
  const auto& id = record.image_id;
  return {{{id, QuadrantIndex::TL, {0.0, 0.0, mx, my}},
           {id, QuadrantIndex::TR, {mx, 0.0, w, my}},
           {id, QuadrantIndex::BL, {0.0, my, mx, h}},
           {id, QuadrantIndex::BR, {mx, my, w, h}}}};
}

int quadrant_label(const ImageRecord& record, const QuadrantRegion& region,
                   int target_class, double tau) {
  if (!(tau > 0.0 && tau <= 1.0))
    throw ValidationError("tau must be in (0, 1]");

  kernels::BoxesSoA boxes;
  std::vector<double> areas;
  for (const auto& gt : record.boxes) {
    if (gt.class_id != target_class) continue;
    boxes.push(gt.bbox);
    areas.push_back(bbox_area(gt.bbox));
  }
  if (boxes.size() == 0) return 0;

  std::vector<double> inter(boxes.size());
  kernels::intersection_area_one_vs_many(region.rect, boxes, inter.data());
  for (size_t i = 0; i < boxes.size(); ++i) {
    if (areas[i] <= 0.0)
      throw ValidationError("degenerate box in image " + record.image_id);
    if (inter[i] / areas[i] >= tau) return 1;
  }
  return 0;
}

std::vector<QuadrantSample> emit_classification_dataset(
    const DatasetManifest& manifest, int target_class, double tau) {
  validate(manifest);
  if (!manifest.class_map.contains(target_class))
    throw ValidationError("unknown target class " +
                          std::to_string(target_class));

  std::vector<const ManifestRecord*> ordered;
  for (const auto& rec : manifest.records) ordered.push_back(&rec);
  std::sort(ordered.begin(), ordered.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->image.image_id < b->image.image_id;
            });

  std::vector<QuadrantSample> samples;
  samples.reserve(ordered.size() * 4);
  for (const ManifestRecord* rec : ordered) {
    std::array<QuadrantRegion, 4> regions;
    try {
      regions = split_quadrants(rec->image);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (image " +
                            rec->image.image_id + ")");
    }
    for (const auto& region : regions)
      samples.push_back(
          {region, quadrant_label(rec->image, region, target_class, tau),
           target_class});
  }
  return samples;
}

void write_quadrant_csv(const std::vector<QuadrantSample>& samples,
                        const std::filesystem::path& file) {
  if (file.has_parent_path())
    std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "image_id,quadrant,x0,y0,x1,y1,label\n";
  for (const auto& s : samples) {
    // Quadrant rects are integral by construction.
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%s,%lld,%lld,%lld,%lld,%d\n",
                  s.region.parent_image_id.c_str(), to_string(s.region.index),
                  static_cast<long long>(s.region.rect.x_min),
                  static_cast<long long>(s.region.rect.y_min),
                  static_cast<long long>(s.region.rect.x_max),
                  static_cast<long long>(s.region.rect.y_max), s.label);
    out << line;
  }
  if (!out) throw IoError("write failed: " + file.string());
}

std::vector<QuadrantSample> parse_quadrant_csv(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<QuadrantSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("image_id,", 0) == 0) continue;
    const std::string ctx = file.string() + ":" + std::to_string(line_no);
    std::istringstream row(line);
    std::string id, quad, x0, y0, x1, y1, label;
    if (!std::getline(row, id, ',') || !std::getline(row, quad, ',') ||
        !std::getline(row, x0, ',') || !std::getline(row, y0, ',') ||
        !std::getline(row, x1, ',') || !std::getline(row, y1, ',') ||
        !std::getline(row, label))
      throw ValidationError(ctx + ": expected 7 fields");
    QuadrantSample s;
    s.region.parent_image_id = id;
    s.region.index = quadrant_from_string(quad);
    try {
      s.region.rect = {std::stod(x0), std::stod(y0), std::stod(x1),
                       std::stod(y1)};
      s.label = std::stoi(label);
    } catch (const std::exception&) {
      throw ValidationError(ctx + ": malformed numeric field");
    }
    if (s.label != 0 && s.label != 1)
      throw ValidationError(ctx + ": label must be 0 or 1");
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace ssod
