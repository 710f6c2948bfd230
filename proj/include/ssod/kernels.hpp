#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ssod/bbox.hpp"

namespace ssod::kernels {

// Structure-of-arrays box storage for the batched kernels.
struct BoxesSoA {
  std::vector<double> x_min, y_min, x_max, y_max;

  size_t size() const { return x_min.size(); }
  void push(const BBox& b) {
    x_min.push_back(b.x_min);
    y_min.push_back(b.y_min);
    x_max.push_back(b.x_max);
    y_max.push_back(b.y_max);
  }
};

// out[i] = intersection_area(a, boxes[i]). Scalar and AVX2 paths are
// bit-identical (same operation order per lane).
void intersection_area_one_vs_many(const BBox& a, const BoxesSoA& boxes,
                                   double* out);

// out[i] = iou(a, boxes[i]). All boxes must be valid (positive area).
void iou_one_vs_many(const BBox& a, const BoxesSoA& boxes, double* out);

// out[i] = (src[i] >= threshold) ? 1 : 0.
void mask_ge_u8(const uint8_t* src, size_t n, uint8_t threshold, uint8_t* out);

// "avx2" or "scalar". Selected once at startup from CPU features; the
// SSOD_KERNELS environment variable ("scalar"/"avx2") overrides.
const char* active_backend();

// Force a backend by name; throws ValidationError if unavailable. Test hook.
void force_backend(const char* name);

bool avx2_available();

}  // namespace ssod::kernels
