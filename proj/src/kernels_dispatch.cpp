#include <cstdlib>
#include <cstring>
#include <string>

#include "ssod/errors.hpp"
#include "ssod/kernels.hpp"

namespace ssod::kernels {

namespace scalar {
void intersection_area_one_vs_many(const BBox&, const BoxesSoA&, double*);
void iou_one_vs_many(const BBox&, const BoxesSoA&, double*);
void mask_ge_u8(const uint8_t*, size_t, uint8_t, uint8_t*);
}  // namespace scalar

namespace avx2 {
void intersection_area_one_vs_many(const BBox&, const BoxesSoA&, double*);
void iou_one_vs_many(const BBox&, const BoxesSoA&, double*);
void mask_ge_u8(const uint8_t*, size_t, uint8_t, uint8_t*);
}  // namespace avx2

namespace {

struct Backend {
  const char* name;
  void (*intersection)(const BBox&, const BoxesSoA&, double*);
  void (*iou)(const BBox&, const BoxesSoA&, double*);
  void (*mask_ge)(const uint8_t*, size_t, uint8_t, uint8_t*);
};

constexpr Backend kScalar{"scalar", scalar::intersection_area_one_vs_many,
                          scalar::iou_one_vs_many, scalar::mask_ge_u8};

#if defined(SSOD_HAVE_AVX2_BACKEND)
constexpr Backend kAvx2{"avx2", avx2::intersection_area_one_vs_many,
                        avx2::iou_one_vs_many, avx2::mask_ge_u8};
#endif

bool cpu_has_avx2() {
#if defined(SSOD_HAVE_AVX2_BACKEND) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Backend* select_default() {
  const char* env = std::getenv("SSOD_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
#if defined(SSOD_HAVE_AVX2_BACKEND)
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &kAvx2;
#endif
  }
#if defined(SSOD_HAVE_AVX2_BACKEND)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Backend*& active() {
  static const Backend* current = select_default();
  return current;
}

}  // namespace

void intersection_area_one_vs_many(const BBox& a, const BoxesSoA& boxes,
                                   double* out) {
  active()->intersection(a, boxes, out);
}

void iou_one_vs_many(const BBox& a, const BoxesSoA& boxes, double* out) {
  active()->iou(a, boxes, out);
}

void mask_ge_u8(const uint8_t* src, size_t n, uint8_t threshold,
                uint8_t* out) {
  active()->mask_ge(src, n, threshold, out);
}

const char* active_backend() { return active()->name; }

bool avx2_available() { return cpu_has_avx2(); }

void force_backend(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    active() = &kScalar;
    return;
  }
#if defined(SSOD_HAVE_AVX2_BACKEND)
  if (std::strcmp(name, "avx2") == 0 && cpu_has_avx2()) {
    active() = &kAvx2;
    return;
  }
#endif
  throw ValidationError(std::string("kernel backend unavailable: ") + name);
}

}  // namespace ssod::kernels
