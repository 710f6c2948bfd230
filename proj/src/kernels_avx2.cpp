// AVX2 variants. Lane operations mirror the scalar reference exactly:
// intersections are masked to +0.0 instead of using max(x, 0) so the sign of
// zero matches, and the iou quotient is masked rather than guarded.

#if defined(__AVX2__)

#include <immintrin.h>

#include "ssod/kernels.hpp"

namespace ssod::kernels::avx2 {

namespace {

inline __m256d masked_intersection(__m256d w, __m256d h) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d both_pos = _mm256_and_pd(_mm256_cmp_pd(w, zero, _CMP_GT_OQ),
                                   _mm256_cmp_pd(h, zero, _CMP_GT_OQ));
  return _mm256_and_pd(both_pos, _mm256_mul_pd(w, h));
}

}  // namespace

void intersection_area_one_vs_many(const BBox& a, const BoxesSoA& boxes,
                                   double* out) {
  const size_t n = boxes.size();
  const __m256d ax1 = _mm256_set1_pd(a.x_min);
  const __m256d ay1 = _mm256_set1_pd(a.y_min);
  const __m256d ax2 = _mm256_set1_pd(a.x_max);
  const __m256d ay2 = _mm256_set1_pd(a.y_max);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d w = _mm256_sub_pd(
        _mm256_min_pd(ax2, _mm256_loadu_pd(&boxes.x_max[i])),
        _mm256_max_pd(ax1, _mm256_loadu_pd(&boxes.x_min[i])));
    __m256d h = _mm256_sub_pd(
        _mm256_min_pd(ay2, _mm256_loadu_pd(&boxes.y_max[i])),
        _mm256_max_pd(ay1, _mm256_loadu_pd(&boxes.y_min[i])));
    _mm256_storeu_pd(&out[i], masked_intersection(w, h));
  }
  for (; i < n; ++i) {
    double w = (a.x_max < boxes.x_max[i] ? a.x_max : boxes.x_max[i]) -
               (a.x_min > boxes.x_min[i] ? a.x_min : boxes.x_min[i]);
    double h = (a.y_max < boxes.y_max[i] ? a.y_max : boxes.y_max[i]) -
               (a.y_min > boxes.y_min[i] ? a.y_min : boxes.y_min[i]);
    out[i] = (w > 0.0 && h > 0.0) ? w * h : 0.0;
  }
}

void iou_one_vs_many(const BBox& a, const BoxesSoA& boxes, double* out) {
  const size_t n = boxes.size();
  const double area_a_s = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  const __m256d ax1 = _mm256_set1_pd(a.x_min);
  const __m256d ay1 = _mm256_set1_pd(a.y_min);
  const __m256d ax2 = _mm256_set1_pd(a.x_max);
  const __m256d ay2 = _mm256_set1_pd(a.y_max);
  const __m256d area_a = _mm256_set1_pd(area_a_s);
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d bx1 = _mm256_loadu_pd(&boxes.x_min[i]);
    __m256d by1 = _mm256_loadu_pd(&boxes.y_min[i]);
    __m256d bx2 = _mm256_loadu_pd(&boxes.x_max[i]);
    __m256d by2 = _mm256_loadu_pd(&boxes.y_max[i]);
    __m256d w = _mm256_sub_pd(_mm256_min_pd(ax2, bx2), _mm256_max_pd(ax1, bx1));
    __m256d h = _mm256_sub_pd(_mm256_min_pd(ay2, by2), _mm256_max_pd(ay1, by1));
    __m256d inter = masked_intersection(w, h);
    __m256d area_b = _mm256_mul_pd(_mm256_sub_pd(bx2, bx1),
                                   _mm256_sub_pd(by2, by1));
    __m256d uni = _mm256_sub_pd(_mm256_add_pd(area_a, area_b), inter);
    __m256d quotient = _mm256_div_pd(inter, uni);
    __m256d valid = _mm256_cmp_pd(uni, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(&out[i], _mm256_and_pd(valid, quotient));
  }
  for (; i < n; ++i) {
    double w = (a.x_max < boxes.x_max[i] ? a.x_max : boxes.x_max[i]) -
               (a.x_min > boxes.x_min[i] ? a.x_min : boxes.x_min[i]);
    double h = (a.y_max < boxes.y_max[i] ? a.y_max : boxes.y_max[i]) -
               (a.y_min > boxes.y_min[i] ? a.y_min : boxes.y_min[i]);
    double inter = (w > 0.0 && h > 0.0) ? w * h : 0.0;
    double area_b = (boxes.x_max[i] - boxes.x_min[i]) *
                    (boxes.y_max[i] - boxes.y_min[i]);
    double uni = area_a_s + area_b - inter;
    out[i] = uni > 0.0 ? inter / uni : 0.0;
  }
}

void mask_ge_u8(const uint8_t* src, size_t n, uint8_t threshold,
                uint8_t* out) {
  const __m256i thr = _mm256_set1_epi8(static_cast<char>(threshold));
  const __m256i ones = _mm256_set1_epi8(1);
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    // v >= thr (unsigned)  <=>  max(v, thr) == v
    __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(v, thr), v);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_and_si256(ge, ones));
  }
  for (; i < n; ++i) out[i] = src[i] >= threshold ? 1 : 0;
}

}  // namespace ssod::kernels::avx2

#endif  // __AVX2__
