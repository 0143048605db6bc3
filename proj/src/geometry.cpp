#include "framescope/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace framescope {

namespace {

// Partial-pivot Gaussian elimination on an n x (n+1) augmented system.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& x) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = a[r][n];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return true;
}

bool three_collinear(const std::array<Point2, 4>& pts) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        const double cross = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                             (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (std::abs(cross) < 1e-9) return true;
      }
  return false;
}

}  // namespace

Point2 Homography::project(const Point2& p) const {
  const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
          (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

double Homography::determinant() const {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Homography Homography::inverse() const {
  const double det = determinant();
  if (std::abs(det) < 1e-12)
    throw Error(ErrorKind::DegenerateConfiguration, "homography is singular");
  Homography inv;
  inv.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  // renormalize to m33 = 1
  const double s = inv.m[2][2];
  if (std::abs(s) > 1e-12)
    for (auto& row : inv.m)
      for (double& v : row) v /= s;
  return inv;
}

Homography compose(const Homography& second, const Homography& first) {
  Homography out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.m[i][j] = 0.0;
      for (int k = 0; k < 3; ++k) out.m[i][j] += second.m[i][k] * first.m[k][j];
    }
  const double s = out.m[2][2];
  if (std::abs(s) > 1e-12)
    for (auto& row : out.m)
      for (double& v : row) v /= s;
  return out;
}

Homography estimate_homography(const QuadCorrespondence& corr) {
  if (three_collinear(corr.src) || three_collinear(corr.dst))
    throw Error(ErrorKind::DegenerateConfiguration,
                "three correspondence points are collinear");

  // DLT with h33 = 1: two equations per correspondence.
  std::vector<std::vector<double>> a(8, std::vector<double>(9, 0.0));
  for (int i = 0; i < 4; ++i) {
    const double x = corr.src[i].x, y = corr.src[i].y;
    const double u = corr.dst[i].x, v = corr.dst[i].y;
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  std::vector<double> h;
  if (!solve_linear(a, h))
    throw Error(ErrorKind::DegenerateConfiguration, "singular DLT system");

  Homography out;
  out.m = {{{h[0], h[1], h[2]}, {h[3], h[4], h[5]}, {h[6], h[7], 1.0}}};
  if (std::abs(out.determinant()) < 1e-12)
    throw Error(ErrorKind::DegenerateConfiguration,
                "estimated homography is singular");
  return out;
}

ImageBuffer warp(const ImageBuffer& image, const Homography& h, int out_w, int out_h) {
  const Homography inv = h.inverse();
  ImageBuffer out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Point2 s = inv.project({static_cast<double>(x), static_cast<double>(y)});
      if (s.x < 0 || s.y < 0 || s.x > image.width - 1 || s.y > image.height - 1)
        continue;  // leave zero
      const int x0 = static_cast<int>(std::floor(s.x));
      const int y0 = static_cast<int>(std::floor(s.y));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const int y1 = std::min(y0 + 1, image.height - 1);
      const double tx = s.x - x0;
      const double ty = s.y - y0;
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - tx) * image.at(x0, y0, c) + tx * image.at(x1, y0, c);
        const double bot = (1 - tx) * image.at(x0, y1, c) + tx * image.at(x1, y1, c);
        out.at(x, y, c) = (1 - ty) * top + ty * bot;
      }
    }
  }
  out.clamp();
  return out;
}

ImageBuffer rectify_quad(const ImageBuffer& image, const std::array<Point2, 4>& quad,
                         int out_w, int out_h) {
  QuadCorrespondence corr;
  corr.src = quad;
  corr.dst = {Point2{0, 0}, Point2{static_cast<double>(out_w - 1), 0},
              Point2{static_cast<double>(out_w - 1), static_cast<double>(out_h - 1)},
              Point2{0, static_cast<double>(out_h - 1)}};
  return warp(image, estimate_homography(corr), out_w, out_h);
}

}  // namespace framescope
