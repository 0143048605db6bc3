#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "framescope/metrics.hpp"
#include "framescope/rng.hpp"

using namespace framescope;

namespace {

BinaryPlane random_plane(int w, int h, uint64_t seed, double density) {
  Rng rng(seed);
  BinaryPlane p(w, h);
  for (auto& v : p.data) v = rng.uniform() < density ? 1 : 0;
  return p;
}

// Independent pixel-count oracle for IoU.
std::optional<double> iou_oracle(const BinaryPlane& a, const BinaryPlane& b) {
  long long inter = 0, uni = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const bool pa = a.data[i] != 0;
    const bool pb = b.data[i] != 0;
    if (pa && pb) ++inter;
    if (pa || pb) ++uni;
  }
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

TEST_CASE("iou: hand-counted example") {
  // pred is the left 10x10 block, truth the center 10x10 block shifted by 5:
  // intersection 50, union 150
  BinaryPlane pred(20, 10), truth(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) pred.at(x, y) = 1;
  for (int y = 0; y < 10; ++y)
    for (int x = 5; x < 15; ++x) truth.at(x, y) = 1;
  const auto v = iou(pred, truth);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
}

TEST_CASE("iou: identical planes give 1, disjoint give 0") {
  const BinaryPlane a = random_plane(16, 16, 1, 0.3);
  CHECK(*iou(a, a) == 1.0);

  BinaryPlane left(8, 8), right(8, 8);
  left.at(0, 0) = 1;
  right.at(7, 7) = 1;
  CHECK(*iou(left, right) == 0.0);
}

TEST_CASE("iou: both empty is undefined") {
  const BinaryPlane a(12, 12), b(12, 12);
  CHECK_FALSE(iou(a, b).has_value());
}

TEST_CASE("iou is symmetric and matches the brute-force oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(32));
    const int h = 1 + static_cast<int>(rng.below(32));
    const BinaryPlane a = random_plane(w, h, rng.next(), rng.uniform());
    const BinaryPlane b = random_plane(w, h, rng.next(), rng.uniform());
    const auto lib = iou(a, b);
    const auto ora = iou_oracle(a, b);
    REQUIRE(lib.has_value() == ora.has_value());
    if (lib) {
      CHECK(*lib == doctest::Approx(*ora).epsilon(1e-12));
      CHECK(*iou(b, a) == doctest::Approx(*lib).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean_iou: single image, three classes") {
  MaskSet pred(8, 8), truth(8, 8);
  // wframe: perfect match
  for (int x = 0; x < 4; ++x) {
    pred.plane(ClassId::WindowFrame).at(x, 0) = 1;
    truth.plane(ClassId::WindowFrame).at(x, 0) = 1;
  }
  // dent: half overlap (pred 2 px, truth 2 px, 1 shared -> 1/3)
  pred.plane(ClassId::Dent).at(0, 2) = 1;
  pred.plane(ClassId::Dent).at(1, 2) = 1;
  truth.plane(ClassId::Dent).at(1, 2) = 1;
  truth.plane(ClassId::Dent).at(2, 2) = 1;
  // bend: both empty -> excluded from support

  const MeanIoUResult r =
      mean_iou({pred}, {truth},
               {ClassId::WindowFrame, ClassId::Dent, ClassId::Bend});
  REQUIRE(r.per_class.size() == 3);
  CHECK(r.per_class[0].iou == doctest::Approx(1.0));
  CHECK(r.per_class[0].support == 1);
  CHECK(r.per_class[1].iou == doctest::Approx(1.0 / 3.0));
  CHECK(r.per_class[2].support == 0);
  CHECK(r.overall == doctest::Approx((1.0 + 1.0 / 3.0) / 2.0));
}

TEST_CASE("mean_iou: per-image mean before the class mean") {
  // one class, two images with IoU 1 and 0 -> class mean 0.5
  MaskSet p1(4, 4), t1(4, 4), p2(4, 4), t2(4, 4);
  p1.plane(ClassId::Scratch).at(0, 0) = 1;
  t1.plane(ClassId::Scratch).at(0, 0) = 1;
  p2.plane(ClassId::Scratch).at(0, 0) = 1;
  t2.plane(ClassId::Scratch).at(1, 1) = 1;
  const MeanIoUResult r = mean_iou({p1, p2}, {t1, t2}, {ClassId::Scratch});
  CHECK(r.per_class[0].iou == doctest::Approx(0.5));
  CHECK(r.per_class[0].support == 2);
  CHECK(r.overall == doctest::Approx(0.5));
}

TEST_CASE("mean_iou: undefined image pairs drop from the support") {
  MaskSet p1(4, 4), t1(4, 4), p2(4, 4), t2(4, 4);
  // image 1 defined with IoU 1, image 2 undefined
  p1.plane(ClassId::Bend).at(2, 2) = 1;
  t1.plane(ClassId::Bend).at(2, 2) = 1;
  const MeanIoUResult r = mean_iou({p1, p2}, {t1, t2}, {ClassId::Bend});
  CHECK(r.per_class[0].support == 1);
  CHECK(r.per_class[0].iou == doctest::Approx(1.0));
}

TEST_CASE("mean_iou: nothing defined anywhere throws") {
  MaskSet p(4, 4), t(4, 4);
  try {
    mean_iou({p}, {t}, {ClassId::Dent});
    FAIL("expected EmptyEvaluation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyEvaluation);
  }
}

TEST_CASE("mean_iou rejects mismatched list lengths") {
  MaskSet p(4, 4), t(4, 4);
  CHECK_THROWS_AS(mean_iou({p, p}, {t}, {ClassId::Dent}), Error);
}

TEST_CASE("improvement_pct: reference values") {
  CHECK(improvement_pct(0.80, 0.91) == doctest::Approx(13.75).epsilon(1e-9));
  CHECK(improvement_pct(0.76, 0.81) ==
        doctest::Approx(100.0 * (0.81 - 0.76) / 0.76).epsilon(1e-12));
  CHECK(improvement_pct(0.46, 0.50) ==
        doctest::Approx(100.0 * 0.04 / 0.46).epsilon(1e-12));
  CHECK(improvement_pct(0.5, 0.4) == doctest::Approx(-20.0));
  CHECK(improvement_pct(0.3, 0.3) == doctest::Approx(0.0));
}

TEST_CASE("improvement_pct: zero baseline throws") {
  try {
    improvement_pct(0.0, 0.5);
    FAIL("expected ZeroBaseline");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroBaseline);
  }
}

TEST_CASE("mean_improvement over three pairs") {
  const double v = mean_improvement({{0.80, 0.91}, {0.76, 0.81}, {0.46, 0.50}});
  const double expected = (100.0 * 0.11 / 0.80 + 100.0 * 0.05 / 0.76 +
                           100.0 * 0.04 / 0.46) / 3.0;
  CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  CHECK(v == doctest::Approx(9.67).epsilon(1e-3));
}

TEST_CASE("iou is invariant to plane transposition of both arguments") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 2 + static_cast<int>(rng.below(20));
    const int h = 2 + static_cast<int>(rng.below(20));
    const BinaryPlane a = random_plane(w, h, rng.next(), 0.4);
    const BinaryPlane b = random_plane(w, h, rng.next(), 0.4);
    BinaryPlane at(h, w), bt(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        at.at(y, x) = a.at(x, y);
        bt.at(y, x) = b.at(x, y);
      }
    const auto v = iou(a, b);
    const auto vt = iou(at, bt);
    REQUIRE(v.has_value() == vt.has_value());
    if (v) CHECK(*v == doctest::Approx(*vt).epsilon(1e-12));
  }
}
