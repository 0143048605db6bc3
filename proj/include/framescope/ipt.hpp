#ifndef FRAMESCOPE_IPT_HPP
#define FRAMESCOPE_IPT_HPP

#include <optional>
#include <string>
#include <vector>

#include "framescope/image.hpp"

namespace framescope {

/// Shadow removal backend selection.
///
/// External serves precomputed shadow-free images from a directory of
/// `<image_id>.png` files. Classic is a built-in illumination-flattening
/// substitute: luminance divided by its large-scale Gaussian blur, mean
/// preserved, chromaticity untouched.
struct ShadowBackend {
  enum class Kind { External, Classic };
  Kind kind = Kind::Classic;
  std::string directory;         // External only
  double sigma_fraction = 0.25;  // Classic only, fraction of min(H,W), in (0,1]

  static ShadowBackend external(std::string dir) {
    ShadowBackend b;
    b.kind = Kind::External;
    b.directory = std::move(dir);
    return b;
  }
  static ShadowBackend classic(double sigma_fraction = 0.25) {
    ShadowBackend b;
    b.kind = Kind::Classic;
    b.sigma_fraction = sigma_fraction;
    return b;
  }
};

/// Illuminant in linear RGB, all components strictly positive.
struct WhitePoint {
  double r = 1.0;
  double g = 1.0;
  double b = 1.0;
};

/// D65 in linear sRGB is the unit white.
inline constexpr WhitePoint kD65White{1.0, 1.0, 1.0};

/// Multi-scale retinex parameters. Scales are Gaussian sigmas in pixels at
/// the 500-px canonical size; apply scaled_to() for other sizes.
struct MsrParams {
  std::vector<double> scales = {15.0, 80.0, 250.0};
  std::vector<double> weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double epsilon = 1e-4;
  int reference_side = 500;

  /// Returns a copy with sigmas scaled proportionally to `side`.
  MsrParams scaled_to(int side) const;

  void validate() const;  // throws ConfigInvalid
};

/// Parameter record for every stage of a strategy.
struct StageParams {
  ShadowBackend shadow = ShadowBackend::classic();
  std::optional<WhitePoint> source_white;  // nullopt = gray-world auto
  WhitePoint target_white = kD65White;
  MsrParams msr;
};

ImageBuffer shadow_removal(const ImageBuffer& image, const ShadowBackend& backend,
                           const std::string& image_id);

ImageBuffer color_neutralize(const ImageBuffer& image,
                             const std::optional<WhitePoint>& source_white,
                             const WhitePoint& target_white = kD65White);

ImageBuffer intensity_neutralize(const ImageBuffer& image, const MsrParams& params);

ImageBuffer contrast_enhance(const ImageBuffer& image);

/// Separable Gaussian blur of a single-channel plane (clamped borders),
/// kernel truncated at 3 sigma. Deterministic for any parallelism degree.
std::vector<double> gaussian_blur(const std::vector<double>& plane, int width,
                                  int height, double sigma);

/// sRGB transfer functions (scalar).
double srgb_decode(double v);
double srgb_encode(double v);

}  // namespace framescope

#endif
