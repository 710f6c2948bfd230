#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ssod/bbox.hpp"
#include "ssod/errors.hpp"
#include "ssod/rng.hpp"
#include "support/gen.hpp"

using namespace ssod;

TEST_CASE("intersection_area basic cases") {
  BBox a{0, 0, 10, 10};
  CHECK(intersection_area(a, a) == 100.0);
  CHECK(intersection_area(a, BBox{20, 20, 30, 30}) == 0.0);
  CHECK(intersection_area(a, BBox{5, 5, 15, 15}) == 25.0);
}

TEST_CASE("boxes touching at an edge do not intersect") {
  BBox a{0, 0, 10, 10};
  CHECK(intersection_area(a, BBox{10, 0, 20, 10}) == 0.0);
  CHECK(intersection_area(a, BBox{0, 10, 10, 20}) == 0.0);
  CHECK(intersection_area(a, BBox{10, 10, 20, 20}) == 0.0);  // corner touch
}

TEST_CASE("overlap_fraction basic cases") {
  BBox region{0, 0, 100, 100};
  CHECK(overlap_fraction(BBox{10, 10, 20, 20}, region) == 1.0);
  CHECK(overlap_fraction(BBox{10, 10, 20, 20}, BBox{50, 50, 60, 60}) == 0.0);
  CHECK(overlap_fraction(BBox{0, 0, 10, 10}, BBox{5, 0, 10, 10}) == 0.5);
}

TEST_CASE("overlap_fraction rejects degenerate boxes") {
  CHECK_THROWS_AS(overlap_fraction(BBox{5, 5, 5, 10}, BBox{0, 0, 10, 10}),
                  ValidationError);
  CHECK_THROWS_AS(overlap_fraction(BBox{5, 5, 4, 10}, BBox{0, 0, 10, 10}),
                  ValidationError);
}

TEST_CASE("iou basic cases") {
  BBox a{0, 0, 2, 2};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, BBox{5, 5, 6, 6}) == 0.0);
  CHECK(iou(a, BBox{1, 0, 3, 2}) == 2.0 / 6.0);
}

TEST_CASE("iou symmetry under fuzz") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    BBox a = testgen::random_box(rng, 500, 400);
    BBox b = testgen::random_box(rng, 500, 400);
    CHECK(iou(a, b) == iou(b, a));
  }
}

TEST_CASE("overlap_fraction is scale invariant") {
  Rng rng(102);
  for (int i = 0; i < 1000; ++i) {
    BBox box = testgen::random_box(rng, 300, 300);
    BBox region = testgen::random_box(rng, 300, 300);
    double s = rng.uniform(0.1, 10.0);
    BBox sbox{box.x_min * s, box.y_min * s, box.x_max * s, box.y_max * s};
    BBox sregion{region.x_min * s, region.y_min * s, region.x_max * s,
                 region.y_max * s};
    CHECK(overlap_fraction(sbox, sregion) ==
          doctest::Approx(overlap_fraction(box, region)).epsilon(1e-12));
  }
}

TEST_CASE("overlap fractions over a quadrant partition sum to 1") {
  Rng rng(103);
  for (int i = 0; i < 1000; ++i) {
    const double w = 200, h = 160;
    const double mx = 100, my = 80;
    BBox quadrants[4] = {{0, 0, mx, my}, {mx, 0, w, my}, {0, my, mx, h},
                         {mx, my, w, h}};
    BBox box = testgen::random_box(rng, w, h);
    double sum = 0.0;
    for (const auto& q : quadrants) sum += overlap_fraction(box, q);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("intersection bounded by the smaller area") {
  Rng rng(104);
  for (int i = 0; i < 1000; ++i) {
    BBox a = testgen::random_box(rng, 500, 400);
    BBox b = testgen::random_box(rng, 500, 400);
    CHECK(intersection_area(a, b) <= std::min(bbox_area(a), bbox_area(b)));
  }
}
