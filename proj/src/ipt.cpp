#include "framescope/ipt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "framescope/png_io.hpp"

namespace framescope {

namespace {

// sRGB (D65) to XYZ.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// Hunt-Pointer-Estevez XYZ to LMS.
constexpr double kXyzToLms[3][3] = {
    {0.38971, 0.68898, -0.07868},
    {-0.22981, 1.18340, 0.04641},
    {0.0, 0.0, 1.0},
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Mat3 matmul(const double a[3][3], const double b[3][3]) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat3 invert3(const Mat3& m) {
  const double det =
      m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

struct LmsMatrices {
  Mat3 rgb_to_lms;
  Mat3 lms_to_rgb;
};

const LmsMatrices& lms_matrices() {
  static const LmsMatrices m = [] {
    LmsMatrices out;
    out.rgb_to_lms = matmul(kXyzToLms, kRgbToXyz);
    out.lms_to_rgb = invert3(out.rgb_to_lms);
    return out;
  }();
  return m;
}

Vec3 apply3(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

std::vector<double> luminance_plane(const ImageBuffer& img) {
  std::vector<double> out(img.pixel_count());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = (img.data[i * 3] + img.data[i * 3 + 1] + img.data[i * 3 + 2]) / 3.0;
  }
  return out;
}

}  // namespace

double srgb_decode(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_encode(double v) {
  return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

std::vector<double> gaussian_blur(const std::vector<double>& plane, int width,
                                  int height, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  // horizontal, clamped borders
  std::vector<double> tmp(plane.size());
  for (int y = 0; y < height; ++y) {
    const double* row = &plane[static_cast<size_t>(y) * width];
    double* orow = &tmp[static_cast<size_t>(y) * width];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xi = std::clamp(x + i, 0, width - 1);
        acc += kernel[i + radius] * row[xi];
      }
      orow[x] = acc;
    }
  }
  // vertical
  std::vector<double> out(plane.size());
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yi = std::clamp(y + i, 0, height - 1);
        acc += kernel[i + radius] * tmp[static_cast<size_t>(yi) * width + x];
      }
      out[static_cast<size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

MsrParams MsrParams::scaled_to(int side) const {
  MsrParams out = *this;
  const double factor = static_cast<double>(side) / reference_side;
  for (double& s : out.scales) s = std::max(0.5, s * factor);
  out.reference_side = side;
  return out;
}

void MsrParams::validate() const {
  if (scales.size() != weights.size())
    throw Error(ErrorKind::ConfigInvalid, "MSR scales/weights length mismatch");
  if (scales.empty())
    throw Error(ErrorKind::ConfigInvalid, "MSR needs at least one scale");
  for (double s : scales)
    if (!(s > 0)) throw Error(ErrorKind::ConfigInvalid, "MSR sigma must be > 0");
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(wsum - 1.0) > 1e-9)
    throw Error(ErrorKind::ConfigInvalid, "MSR weights must sum to 1");
}

ImageBuffer shadow_removal(const ImageBuffer& image, const ShadowBackend& backend,
                           const std::string& image_id) {
  if (backend.kind == ShadowBackend::Kind::External) {
    const std::filesystem::path file =
        std::filesystem::path(backend.directory) / (image_id + ".png");
    if (!std::filesystem::exists(file))
      throw Error(ErrorKind::MissingExternal,
                  "no shadow-free image for id '" + image_id + "' at " +
                      file.string());
    ImageBuffer stored = read_png_rgb(file.string());
    if (!stored.same_shape(image))
      throw Error(ErrorKind::DimensionMismatch,
                  "shadow-free image dimensions differ for id " + image_id);
    return stored;
  }

  if (!(backend.sigma_fraction > 0.0 && backend.sigma_fraction <= 1.0))
    throw Error(ErrorKind::ConfigInvalid, "sigma_fraction must be in (0,1]");

  const double sigma =
      backend.sigma_fraction * std::min(image.width, image.height);
  const std::vector<double> lum = luminance_plane(image);
  const std::vector<double> blur =
      gaussian_blur(lum, image.width, image.height, sigma);

  constexpr double kEps = 1e-6;
  std::vector<double> flat(lum.size());
  double mean_in = 0.0, mean_flat = 0.0;
  for (size_t i = 0; i < lum.size(); ++i) {
    flat[i] = lum[i] / std::max(blur[i], kEps);
    mean_in += lum[i];
    mean_flat += flat[i];
  }
  const double gain = mean_flat > kEps ? mean_in / mean_flat : 1.0;

  ImageBuffer out(image.width, image.height);
  for (size_t i = 0; i < lum.size(); ++i) {
    const double target = flat[i] * gain;
    const double scale = target / std::max(lum[i], kEps);
    for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = image.data[i * 3 + c] * scale;
  }
  out.clamp();
  return out;
}

ImageBuffer color_neutralize(const ImageBuffer& image,
                             const std::optional<WhitePoint>& source_white,
                             const WhitePoint& target_white) {
  const auto& mats = lms_matrices();

  // linear-light copy
  std::vector<double> linear(image.data.size());
  for (size_t i = 0; i < linear.size(); ++i) linear[i] = srgb_decode(image.data[i]);

  Vec3 src;
  if (source_white) {
    if (!(source_white->r > 0 && source_white->g > 0 && source_white->b > 0))
      throw Error(ErrorKind::DegenerateWhite, "source white must be positive");
    src = {source_white->r, source_white->g, source_white->b};
  } else {
    // gray-world estimate in linear RGB
    src = {0, 0, 0};
    const size_t n = image.pixel_count();
    for (size_t i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) src[c] += linear[i * 3 + c];
    for (int c = 0; c < 3; ++c) src[c] /= static_cast<double>(n);
  }
  if (!(target_white.r > 0 && target_white.g > 0 && target_white.b > 0))
    throw Error(ErrorKind::DegenerateWhite, "target white must be positive");

  const Vec3 src_lms = apply3(mats.rgb_to_lms, src);
  const Vec3 dst_lms =
      apply3(mats.rgb_to_lms, {target_white.r, target_white.g, target_white.b});
  Vec3 diag;
  for (int c = 0; c < 3; ++c) {
    if (std::abs(src_lms[c]) < 1e-9)
      throw Error(ErrorKind::DegenerateWhite, "source white degenerate in LMS");
    diag[c] = dst_lms[c] / src_lms[c];
  }

  ImageBuffer out(image.width, image.height);
  const size_t n = image.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    Vec3 rgb = {linear[i * 3], linear[i * 3 + 1], linear[i * 3 + 2]};
    Vec3 lms = apply3(mats.rgb_to_lms, rgb);
    for (int c = 0; c < 3; ++c) lms[c] *= diag[c];
    rgb = apply3(mats.lms_to_rgb, lms);
    for (int c = 0; c < 3; ++c)
      out.data[i * 3 + c] = srgb_encode(std::max(rgb[c], 0.0));
  }
  out.clamp();
  return out;
}

ImageBuffer intensity_neutralize(const ImageBuffer& image, const MsrParams& params) {
  params.validate();
  const std::vector<double> intensity = luminance_plane(image);
  const size_t n = intensity.size();
  const double eps = params.epsilon;

  std::vector<double> msr(n, 0.0);
  std::vector<double> log_i(n);
  for (size_t i = 0; i < n; ++i) log_i[i] = std::log(intensity[i] + eps);
  for (size_t k = 0; k < params.scales.size(); ++k) {
    const std::vector<double> blur =
        gaussian_blur(intensity, image.width, image.height, params.scales[k]);
    const double w = params.weights[k];
    for (size_t i = 0; i < n; ++i)
      msr[i] += w * (log_i[i] - std::log(blur[i] + eps));
  }

  // stretch the 1st..99th percentile onto [0,1]
  std::vector<double> sorted = msr;
  std::sort(sorted.begin(), sorted.end());
  const auto pct = [&](double p) {
    return sorted[static_cast<size_t>(std::llround(p * (n - 1)))];
  };
  const double lo = pct(0.01);
  const double hi = pct(0.99);
  if (hi - lo < 1e-9) return image;  // degenerate response, e.g. constant input

  ImageBuffer out(image.width, image.height);
  for (size_t i = 0; i < n; ++i) {
    const double target = (msr[i] - lo) / (hi - lo);
    const double scale = target / std::max(intensity[i], eps);
    for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = image.data[i * 3 + c] * scale;
  }
  out.clamp();
  return out;
}

ImageBuffer contrast_enhance(const ImageBuffer& image) {
  ImageBuffer out(image.width, image.height);
  const size_t n = image.pixel_count();
  for (int c = 0; c < 3; ++c) {
    size_t hist[256] = {0};
    for (size_t i = 0; i < n; ++i) {
      const int bin = static_cast<int>(std::lround(image.data[i * 3 + c] * 255.0));
      ++hist[std::clamp(bin, 0, 255)];
    }
    double cdf[256];
    double cum = 0.0;
    double cdf_min = 0.0;
    for (int v = 0; v < 256; ++v) {
      cum += static_cast<double>(hist[v]) / n;
      cdf[v] = cum;
      if (cdf_min == 0.0 && hist[v] > 0) cdf_min = cdf[v];
    }
    if (cdf_min >= 1.0) {  // constant channel
      for (size_t i = 0; i < n; ++i) out.data[i * 3 + c] = image.data[i * 3 + c];
      continue;
    }
    double lut[256];
    for (int v = 0; v < 256; ++v) {
      lut[v] =
          std::lround(255.0 * (cdf[v] - cdf_min) / (1.0 - cdf_min)) / 255.0;
    }
    for (size_t i = 0; i < n; ++i) {
      const int bin = std::clamp(
          static_cast<int>(std::lround(image.data[i * 3 + c] * 255.0)), 0, 255);
      out.data[i * 3 + c] = lut[bin];
    }
  }
  out.clamp();
  return out;
}

}  // namespace framescope
