#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "framescope/geometry.hpp"
#include "framescope/rng.hpp"

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

// Independent long-double Gauss-Jordan oracle for the DLT system, kept
// separate from the library's elimination code on purpose.
Homography dlt_oracle(const QuadCorrespondence& corr) {
  long double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const long double x = corr.src[i].x, y = corr.src[i].y;
    const long double u = corr.dst[i].x, v = corr.dst[i].y;
    long double* r0 = a[2 * i];
    long double* r1 = a[2 * i + 1];
    r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -u * x; r0[7] = -u * y; r0[8] = u;
    r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -v * x; r1[7] = -v * y; r1[8] = v;
  }
  for (int col = 0; col < 8; ++col) {
    int piv = col;
    for (int r = col + 1; r < 8; ++r)
      if (fabsl(a[r][col]) > fabsl(a[piv][col])) piv = r;
    for (int j = 0; j < 9; ++j) std::swap(a[col][j], a[piv][j]);
    const long double p = a[col][col];
    REQUIRE(fabsl(p) > 1e-15L);
    for (int j = 0; j < 9; ++j) a[col][j] /= p;
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const long double f = a[r][col];
      for (int j = 0; j < 9; ++j) a[r][j] -= f * a[col][j];
    }
  }
  Homography h;
  for (int i = 0; i < 8; ++i)
    h.m[i / 3][i % 3] = static_cast<double>(a[i][8]);
  h.m[2][2] = 1.0;
  return h;
}

}  // namespace

TEST_CASE("estimate_homography: identity correspondences") {
  const QuadCorrespondence corr{
      {{{0, 0}, {10, 0}, {10, 10}, {0, 10}}},
      {{{0, 0}, {10, 0}, {10, 10}, {0, 10}}}};
  const Homography h = estimate_homography(corr);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h.m[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("estimate_homography: pure translation") {
  const QuadCorrespondence corr{
      {{{0, 0}, {5, 0}, {5, 5}, {0, 5}}},
      {{{3, -2}, {8, -2}, {8, 3}, {3, 3}}}};
  const Homography h = estimate_homography(corr);
  CHECK(h.m[0][2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(h.m[1][2] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(h.m[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.m[2][0] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("estimate_homography matches the independent oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    QuadCorrespondence corr;
    corr.src = {{{0, 0}, {100, 0}, {100, 100}, {0, 100}}};
    for (auto& p : corr.dst) {
      p.x = rng.uniform(-50.0, 150.0);
      p.y = rng.uniform(-50.0, 150.0);
    }
    Homography lib;
    try {
      lib = estimate_homography(corr);
    } catch (const Error&) {
      continue;  // random destination quad can be degenerate
    }
    const Homography ora = dlt_oracle(corr);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(lib.m[i][j] - ora.m[i][j]) <
              1e-8 * std::max(1.0, std::abs(ora.m[i][j])));
  }
}

TEST_CASE("estimate_homography: exact reprojection of random quads") {
  Rng rng(22);
  int accepted = 0;
  while (accepted < 1000) {
    QuadCorrespondence corr;
    // convex-ish source: jittered unit square scaled up
    const Point2 base[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int i = 0; i < 4; ++i) {
      corr.src[i] = {base[i].x * 200 + rng.uniform(-30.0, 30.0),
                     base[i].y * 200 + rng.uniform(-30.0, 30.0)};
      corr.dst[i] = {base[i].x * 150 + rng.uniform(-40.0, 40.0),
                     base[i].y * 150 + rng.uniform(-40.0, 40.0)};
    }
    Homography h;
    try {
      h = estimate_homography(corr);
    } catch (const Error&) {
      continue;
    }
    ++accepted;
    for (int i = 0; i < 4; ++i) {
      const Point2 p = h.project(corr.src[i]);
      CHECK(std::abs(p.x - corr.dst[i].x) < 1e-9);
      CHECK(std::abs(p.y - corr.dst[i].y) < 1e-9);
    }
  }
}

TEST_CASE("estimate_homography rejects collinear corners") {
  const QuadCorrespondence corr{
      {{{0, 0}, {1, 1}, {2, 2}, {3, 3}}},
      {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  try {
    estimate_homography(corr);
    FAIL("expected DegenerateConfiguration");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateConfiguration);
  }
}

TEST_CASE("Homography inverse and compose") {
  const QuadCorrespondence corr{
      {{{0, 0}, {10, 0}, {10, 10}, {0, 10}}},
      {{{1, 2}, {12, 1}, {11, 12}, {0, 9}}}};
  const Homography h = estimate_homography(corr);
  const Homography round = compose(h.inverse(), h);
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const Point2 p{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    const Point2 q = round.project(p);
    CHECK(std::abs(q.x - p.x) < 1e-9);
    CHECK(std::abs(q.y - p.y) < 1e-9);
  }
}

TEST_CASE("warp with the identity is bit-exact") {
  const ImageBuffer img = random_image(24, 18, 24);
  const ImageBuffer out = warp(img, Homography::identity(), 24, 18);
  CHECK(max_abs_diff(out, img) == 0.0);
}

TEST_CASE("warp by an integer shift moves pixels and zero-fills") {
  const ImageBuffer img = random_image(8, 8, 25);
  Homography shift;  // input -> output shift by +3, so out(x,y) = in(x-3,y)
  shift.m[0][2] = 3.0;
  const ImageBuffer out = warp(img, shift, 8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x)
      for (int c = 0; c < 3; ++c) {
        const double expected = (x < 3) ? 0.0 : img.at(x - 3, y, c);
        CHECK(out.at(x, y, c) == doctest::Approx(expected).epsilon(1e-12));
      }
  }
}

TEST_CASE("warp: bilinear half-pixel sample on a 2x2 image") {
  ImageBuffer img(2, 2);
  img.at(0, 0, 0) = 0.0;
  img.at(1, 0, 0) = 1.0;
  img.at(0, 1, 0) = 1.0;
  img.at(1, 1, 0) = 0.0;
  Homography h;  // output pixel (0,0) samples input (0.5, 0.5)
  h.m[0][2] = -0.5;
  h.m[1][2] = -0.5;
  const ImageBuffer out = warp(img, h, 1, 1);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("warp round trip stays close on the interior") {
  // smooth content: bilinear resampling error scales with curvature
  ImageBuffer img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = 0.5 + 0.45 * std::sin(0.11 * x + 0.07 * y + 1.3 * c);
  const QuadCorrespondence corr{
      {{{0, 0}, {63, 0}, {63, 63}, {0, 63}}},
      {{{2, 1}, {61, 3}, {62, 60}, {1, 62}}}};
  const Homography h = estimate_homography(corr);
  const ImageBuffer fwd = warp(img, h, 64, 64);
  const ImageBuffer back = warp(fwd, h.inverse(), 64, 64);
  double worst = 0.0;
  for (int y = 8; y < 56; ++y)
    for (int x = 8; x < 56; ++x)
      for (int c = 0; c < 3; ++c)
        worst = std::max(worst, std::abs(back.at(x, y, c) - img.at(x, y, c)));
  CHECK(worst <= 0.02);
}

TEST_CASE("warp composition matches sequential warps on smooth content") {
  // smooth image so a single resample is close to two
  ImageBuffer img(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = 0.5 + 0.4 * std::sin(0.15 * x + 0.1 * y + c);
  Homography a;  // shift left 2
  a.m[0][2] = -2.0;
  Homography b;  // shift up 3
  b.m[1][2] = -3.0;
  const ImageBuffer two_step = warp(warp(img, a, 48, 48), b, 48, 48);
  const ImageBuffer one_step = warp(img, compose(b, a), 48, 48);
  double worst = 0.0;
  for (int y = 6; y < 42; ++y)
    for (int x = 6; x < 42; ++x)
      worst = std::max(worst, std::abs(two_step.at(x, y, 0) - one_step.at(x, y, 0)));
  CHECK(worst < 1e-9);
}

TEST_CASE("rectify_quad maps the quad corners to the output corners") {
  const ImageBuffer img = random_image(40, 40, 27);
  const std::array<Point2, 4> quad = {{{5, 6}, {34, 4}, {36, 35}, {4, 33}}};
  const ImageBuffer out = rectify_quad(img, quad, 20, 20);
  CHECK(out.width == 20);
  CHECK(out.height == 20);
  // corner pixels of the output sample exactly the quad corners
  const double tl = out.at(0, 0, 0);
  CHECK(tl == doctest::Approx(img.at(5, 6, 0)).epsilon(1e-9));
  const double br = out.at(19, 19, 0);
  CHECK(br == doctest::Approx(img.at(36, 35, 0)).epsilon(1e-9));
}

TEST_CASE("rectify_quad of the full frame at native size is near-identity") {
  const ImageBuffer img = random_image(16, 16, 28);
  const std::array<Point2, 4> quad = {{{0, 0}, {15, 0}, {15, 15}, {0, 15}}};
  const ImageBuffer out = rectify_quad(img, quad, 16, 16);
  CHECK(max_abs_diff(out, img) < 1e-9);
}
