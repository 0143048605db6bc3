#ifndef FRAMESCOPE_RESIZE_HPP
#define FRAMESCOPE_RESIZE_HPP

#include "framescope/image.hpp"

namespace framescope {

/// Resamples to a square `side` x `side` raster. Shrinking axes use exact
/// area averaging, enlarging axes bilinear interpolation. Non-square inputs
/// are stretched, not letterboxed. A same-size input is returned bit-exact.
ImageBuffer resize_canonical(const ImageBuffer& image, int side = 500);

}  // namespace framescope

#endif
