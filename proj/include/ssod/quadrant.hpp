#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ssod/types.hpp"

namespace ssod {

enum class QuadrantIndex { TL = 0, TR = 1, BL = 2, BR = 3 };

const char* to_string(QuadrantIndex q);
QuadrantIndex quadrant_from_string(const std::string& s);

struct QuadrantRegion {
  std::string parent_image_id;
  QuadrantIndex index = QuadrantIndex::TL;
  BBox rect;
};

struct QuadrantSample {
  QuadrantRegion region;
  int label = 0;  // 0 or 1
  int target_class = 0;
};

// Split lines at floor(w/2), floor(h/2); right/bottom quadrants absorb the
// odd pixel. The four rects are disjoint and cover the image. Throws on
// images smaller than 2x2.
std::array<QuadrantRegion, 4> split_quadrants(const ImageRecord& record);

// 1 iff any single target-class box has overlap_fraction(box, rect) >= tau
// (inclusive). tau must be in (0, 1].
int quadrant_label(const ImageRecord& record, const QuadrantRegion& region,
                   int target_class, double tau);

// Four samples per image, ordered by (image_id, quadrant index). Crop rects
// are recorded so pixels can be cut downstream; no raster work happens here.
std::vector<QuadrantSample> emit_classification_dataset(
    const DatasetManifest& manifest, int target_class, double tau);

// CSV: image_id,quadrant,x0,y0,x1,y1,label (one header row).
void write_quadrant_csv(const std::vector<QuadrantSample>& samples,
                        const std::filesystem::path& file);
std::vector<QuadrantSample> parse_quadrant_csv(
    const std::filesystem::path& file);

}  // namespace ssod
