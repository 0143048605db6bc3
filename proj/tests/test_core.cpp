#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "framescope/resize.hpp"
#include "framescope/rng.hpp"
#include "framescope/strategy.hpp"

using namespace framescope;

namespace {

ImageBuffer random_image(int w, int h, uint64_t seed) {
  Rng rng(seed);
  ImageBuffer img(w, h);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("ImageBuffer invariants") {
  ImageBuffer img(4, 3, 0.5);
  CHECK(img.valid());
  CHECK(img.data.size() == 4 * 3 * 3);
  img.at(0, 0, 0) = 1.5;
  CHECK_FALSE(img.valid());
  img.clamp();
  CHECK(img.valid());
  CHECK(img.at(0, 0, 0) == 1.0);
}

TEST_CASE("validate_strategy") {
  CHECK(validate_strategy({}).empty());
  CHECK(validate_strategy({StageId::CE}).stages ==
        std::vector<StageId>{StageId::CE});

  CHECK_THROWS_AS(validate_strategy({StageId::SR, StageId::SR}), Error);
  try {
    validate_strategy({StageId::SR, StageId::SR});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateStage);
  }
  // order preserved, not canonicalized
  const Strategy s = validate_strategy({StageId::CE, StageId::SR});
  CHECK(s.label() == "CE+SR");
}

TEST_CASE("apply_strategy: empty strategy is the bit-exact identity") {
  const ImageBuffer img = random_image(17, 11, 1);
  const ImageBuffer out = apply_strategy(validate_strategy({}), img);
  CHECK(max_abs_diff(out, img) == 0.0);
}

TEST_CASE("apply_strategy equals explicit stage nesting") {
  const ImageBuffer img = random_image(24, 24, 2);
  const Strategy all = validate_strategy(
      {StageId::SR, StageId::CN, StageId::IN, StageId::CE});

  const ImageBuffer composed = apply_strategy(all, img);
  ImageBuffer manual = shadow_removal(img, all.params.shadow, "");
  manual = color_neutralize(manual, all.params.source_white, all.params.target_white);
  manual = intensity_neutralize(manual, all.params.msr.scaled_to(24));
  manual = contrast_enhance(manual);
  CHECK(max_abs_diff(composed, manual) == 0.0);
}

TEST_CASE("apply_strategy: CN fixed point on an image balanced to the target") {
  // gray-world mean equal to the target white (unit) means an all-white image
  const ImageBuffer white(8, 8, 1.0);
  const ImageBuffer out = apply_strategy(validate_strategy({StageId::CN}), white);
  CHECK(max_abs_diff(out, white) < 1e-6);
}

TEST_CASE("apply_strategy composes associatively") {
  const ImageBuffer img = random_image(16, 16, 3);
  const std::vector<StageId> full = {StageId::CN, StageId::IN, StageId::CE};
  for (size_t cut = 0; cut <= full.size(); ++cut) {
    const std::vector<StageId> prefix(full.begin(), full.begin() + cut);
    const std::vector<StageId> suffix(full.begin() + cut, full.end());
    const ImageBuffer split_result = apply_strategy(
        validate_strategy(suffix), apply_strategy(validate_strategy(prefix), img));
    const ImageBuffer joint = apply_strategy(validate_strategy(full), img);
    CHECK(max_abs_diff(split_result, joint) == 0.0);
  }
}

TEST_CASE("resize_canonical: same-size input is bit-exact") {
  const ImageBuffer img = random_image(32, 32, 4);
  const ImageBuffer out = resize_canonical(img, 32);
  CHECK(max_abs_diff(out, img) == 0.0);
}

TEST_CASE("resize_canonical: shape contract on shrink") {
  const ImageBuffer img(100, 60, 0.25);
  const ImageBuffer out = resize_canonical(img, 50);
  CHECK(out.width == 50);
  CHECK(out.height == 50);
  CHECK(out.valid());
}

TEST_CASE("resize_canonical: area averaging of constant blocks") {
  // 4x4 of 2x2 constant blocks {0,1 / 1,0} shrinks to the exact block means
  ImageBuffer img(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      const double v = ((x / 2) ^ (y / 2)) ? 1.0 : 0.0;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  const ImageBuffer out = resize_canonical(img, 2);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.at(1, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.at(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.at(1, 1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("resize_canonical: idempotent after the first call") {
  const ImageBuffer img = random_image(37, 23, 5);
  const ImageBuffer once = resize_canonical(img, 16);
  const ImageBuffer twice = resize_canonical(once, 16);
  CHECK(max_abs_diff(once, twice) == 0.0);
}

TEST_CASE("resize_canonical: enlarging keeps the range") {
  const ImageBuffer img = random_image(9, 9, 6);
  const ImageBuffer out = resize_canonical(img, 30);
  CHECK(out.width == 30);
  CHECK(out.valid());
}
