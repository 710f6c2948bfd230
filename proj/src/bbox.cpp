#include "ssod/bbox.hpp"

#include <algorithm>

#include "ssod/errors.hpp"

namespace ssod {

bool bbox_valid(const BBox& b) {
  return b.x_min < b.x_max && b.y_min < b.y_max;
}

double bbox_area(const BBox& b) {
  return (b.x_max - b.x_min) * (b.y_max - b.y_min);
}

double intersection_area(const BBox& a, const BBox& b) {
  double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

double overlap_fraction(const BBox& box, const BBox& region) {
  double area = bbox_area(box);
  if (area <= 0.0) throw ValidationError("degenerate box");
  return intersection_area(box, region) / area;
}

double iou(const BBox& a, const BBox& b) {
  double inter = intersection_area(a, b);
  double uni = bbox_area(a) + bbox_area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace ssod
