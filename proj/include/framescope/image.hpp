#ifndef FRAMESCOPE_IMAGE_HPP
#define FRAMESCOPE_IMAGE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "framescope/error.hpp"

namespace framescope {

/// H x W x 3 row-major RGB raster with samples in [0,1].
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // size = width * height * 3, interleaved RGB

  ImageBuffer() = default;
  ImageBuffer(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h * 3, fill) {}

  double& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }

  bool same_shape(const ImageBuffer& o) const {
    return width == o.width && height == o.height;
  }

  /// True when every sample lies in [0,1] and the buffer size is consistent.
  bool valid() const;

  /// Clamps every sample into [0,1] in place.
  void clamp();
};

enum class ClassId : int {
  WindowFrame = 0,
  Dent = 1,
  Bend = 2,
  Scratch = 3,
};

inline constexpr int kNumClasses = 4;
inline constexpr std::array<ClassId, kNumClasses> kAllClasses = {
    ClassId::WindowFrame, ClassId::Dent, ClassId::Bend, ClassId::Scratch};

const std::string& class_name(ClassId id);

/// Case-insensitive lookup; throws UnknownCategory when the name is not one
/// of the four classes.
ClassId class_from_name(const std::string& name);

/// Single binary plane, row-major, one byte per pixel (0 or 1).
struct BinaryPlane {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  BinaryPlane() = default;
  BinaryPlane(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}

  uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

  size_t count_set() const;
  bool empty_plane() const { return count_set() == 0; }
};

/// Per-class binary masks aligned to one image.
struct MaskSet {
  int width = 0;
  int height = 0;
  std::array<BinaryPlane, kNumClasses> planes;

  MaskSet() = default;
  MaskSet(int w, int h) : width(w), height(h) {
    for (auto& p : planes) p = BinaryPlane(w, h);
  }

  BinaryPlane& plane(ClassId id) { return planes[static_cast<int>(id)]; }
  const BinaryPlane& plane(ClassId id) const {
    return planes[static_cast<int>(id)];
  }
};

}  // namespace framescope

#endif
