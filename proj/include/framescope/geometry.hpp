#ifndef FRAMESCOPE_GEOMETRY_HPP
#define FRAMESCOPE_GEOMETRY_HPP

#include <array>

#include "framescope/image.hpp"

namespace framescope {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// 3x3 projective transform, normalized so m[2][2] == 1.
struct Homography {
  std::array<std::array<double, 3>, 3> m = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  Point2 project(const Point2& p) const;
  Homography inverse() const;  // throws DegenerateConfiguration when singular
  double determinant() const;

  static Homography identity() { return {}; }
};

Homography compose(const Homography& second, const Homography& first);

struct QuadCorrespondence {
  std::array<Point2, 4> src;
  std::array<Point2, 4> dst;
};

/// Direct linear transform: solves the 8x8 system with h33 = 1. Exact on
/// the four correspondences; throws DegenerateConfiguration when the points
/// are collinear or the system is singular.
Homography estimate_homography(const QuadCorrespondence& corr);

/// Inverse-mapped warp with bilinear sampling; out-of-bounds samples are 0.
ImageBuffer warp(const ImageBuffer& image, const Homography& h, int out_w, int out_h);

/// Maps `quad` corners onto the full output rectangle and warps.
ImageBuffer rectify_quad(const ImageBuffer& image, const std::array<Point2, 4>& quad,
                         int out_w, int out_h);

}  // namespace framescope

#endif
