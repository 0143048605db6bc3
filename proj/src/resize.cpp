#include "framescope/resize.hpp"

#include <algorithm>
#include <cmath>

namespace framescope {
namespace {

// One separable pass along x. `in` is h rows of w_in pixels (3 channels);
// area averaging when shrinking, bilinear when enlarging.
std::vector<double> resample_rows(const std::vector<double>& in, int w_in, int h,
                                  int w_out) {
  std::vector<double> out(static_cast<size_t>(w_out) * h * 3);
  if (w_out == w_in) {
    out = in;
    return out;
  }
  const double scale = static_cast<double>(w_in) / w_out;
  for (int y = 0; y < h; ++y) {
    const double* row = &in[static_cast<size_t>(y) * w_in * 3];
    double* orow = &out[static_cast<size_t>(y) * w_out * 3];
    if (w_out < w_in) {
      for (int x = 0; x < w_out; ++x) {
        const double a = x * scale;
        const double b = (x + 1) * scale;
        double acc[3] = {0, 0, 0};
        int i0 = static_cast<int>(std::floor(a));
        int i1 = std::min(static_cast<int>(std::ceil(b)), w_in);
        for (int i = i0; i < i1; ++i) {
          const double cover =
              std::min<double>(b, i + 1) - std::max<double>(a, i);
          for (int c = 0; c < 3; ++c) acc[c] += cover * row[i * 3 + c];
        }
        for (int c = 0; c < 3; ++c) orow[x * 3 + c] = acc[c] / scale;
      }
    } else {
      for (int x = 0; x < w_out; ++x) {
        double sx = (x + 0.5) * scale - 0.5;
        sx = std::clamp(sx, 0.0, static_cast<double>(w_in - 1));
        const int i0 = static_cast<int>(std::floor(sx));
        const int i1 = std::min(i0 + 1, w_in - 1);
        const double t = sx - i0;
        for (int c = 0; c < 3; ++c)
          orow[x * 3 + c] = (1.0 - t) * row[i0 * 3 + c] + t * row[i1 * 3 + c];
      }
    }
  }
  return out;
}

// Transpose helper so the vertical pass reuses resample_rows.
std::vector<double> transpose(const std::vector<double>& in, int w, int h) {
  std::vector<double> out(in.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out[(static_cast<size_t>(x) * h + y) * 3 + c] =
            in[(static_cast<size_t>(y) * w + x) * 3 + c];
  return out;
}

}  // namespace

ImageBuffer resize_canonical(const ImageBuffer& image, int side) {
  if (side < 1) throw Error(ErrorKind::ConfigInvalid, "side must be >= 1");
  if (image.width == side && image.height == side) return image;

  std::vector<double> horiz = resample_rows(image.data, image.width, image.height, side);
  std::vector<double> t = transpose(horiz, side, image.height);
  std::vector<double> vert = resample_rows(t, image.height, side, side);

  ImageBuffer out(side, side);
  out.data = transpose(vert, side, side);
  out.clamp();
  return out;
}

}  // namespace framescope
