#pragma once

namespace ssod {

// Axis-aligned box in absolute pixels, origin top-left. Half-open edges:
// boxes touching along an edge have zero intersection.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

bool bbox_valid(const BBox& b);
double bbox_area(const BBox& b);

// Area of geometric intersection; 0 when disjoint or touching.
double intersection_area(const BBox& a, const BBox& b);

// intersection_area(box, region) / area(box). Throws ValidationError on a
// degenerate (zero-area) box.
double overlap_fraction(const BBox& box, const BBox& region);

// Intersection over union; symmetric, in [0, 1].
double iou(const BBox& a, const BBox& b);

}  // namespace ssod
