// Reference kernels. The AVX2 variants mirror these operation-for-operation
// so both backends produce bit-identical output.

#include <algorithm>

#include "ssod/kernels.hpp"

namespace ssod::kernels::scalar {

void intersection_area_one_vs_many(const BBox& a, const BoxesSoA& boxes,
                                   double* out) {
  const size_t n = boxes.size();
  for (size_t i = 0; i < n; ++i) {
    double w = std::min(a.x_max, boxes.x_max[i]) -
               std::max(a.x_min, boxes.x_min[i]);
    double h = std::min(a.y_max, boxes.y_max[i]) -
               std::max(a.y_min, boxes.y_min[i]);
    out[i] = (w > 0.0 && h > 0.0) ? w * h : 0.0;
  }
}

void iou_one_vs_many(const BBox& a, const BoxesSoA& boxes, double* out) {
  const size_t n = boxes.size();
  const double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  for (size_t i = 0; i < n; ++i) {
    double w = std::min(a.x_max, boxes.x_max[i]) -
               std::max(a.x_min, boxes.x_min[i]);
    double h = std::min(a.y_max, boxes.y_max[i]) -
               std::max(a.y_min, boxes.y_min[i]);
    double inter = (w > 0.0 && h > 0.0) ? w * h : 0.0;
    double area_b = (boxes.x_max[i] - boxes.x_min[i]) *
                    (boxes.y_max[i] - boxes.y_min[i]);
    double uni = area_a + area_b - inter;
    out[i] = uni > 0.0 ? inter / uni : 0.0;
  }
}

void mask_ge_u8(const uint8_t* src, size_t n, uint8_t threshold,
                uint8_t* out) {
  for (size_t i = 0; i < n; ++i) out[i] = src[i] >= threshold ? 1 : 0;
}

}  // namespace ssod::kernels::scalar
