#ifndef FRAMESCOPE_PNG_IO_HPP
#define FRAMESCOPE_PNG_IO_HPP

#include <string>

#include "framescope/image.hpp"

namespace framescope {

/// 8-bit RGB PNG decode; samples mapped v/255 into [0,1].
ImageBuffer read_png_rgb(const std::string& path);

/// 8-bit RGB PNG encode; samples quantized round(v*255).
void write_png_rgb(const std::string& path, const ImageBuffer& image);

/// Single-channel mask PNG: nonzero pixels read as 1; written as 0/255.
BinaryPlane read_png_mask(const std::string& path);
void write_png_mask(const std::string& path, const BinaryPlane& plane);

}  // namespace framescope

#endif
