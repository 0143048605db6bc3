#ifndef FRAMESCOPE_DATAIO_HPP
#define FRAMESCOPE_DATAIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "framescope/geometry.hpp"
#include "framescope/image.hpp"

namespace framescope {

struct DatasetEntry {
  std::string id;
  ImageBuffer image;
  MaskSet masks;
  /// Source polygons, one (class, polygon) pair per annotation. Masks are
  /// their rasterization after priority resolution.
  std::vector<std::pair<ClassId, std::vector<Point2>>> annotations;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
};

using Polygon = std::vector<Point2>;

/// Pixel-center even-odd fill of a polygon set into one binary plane.
/// Each polygon needs at least 3 vertices.
BinaryPlane rasterize(const std::vector<Polygon>& polygons, int side);

/// Overlap resolution: Scratch > Dent > Bend > WindowFrame. Clears every
/// lower-priority plane where a higher-priority one is set.
void resolve_mask_priority(MaskSet& masks);

/// COCO-style JSON (images / polygon-segmentation annotations / categories).
/// Category names match the four classes case-insensitively; RLE
/// segmentations and unknown categories are rejected.
Dataset load_coco(const std::string& annotation_file, const std::string& image_dir);

/// Seeded shuffle then partition into train/val/test of the given sizes.
struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};
SplitResult split(const Dataset& dataset, int train_count, int val_count,
                  int test_count, uint64_t seed);

/// Synthetic window-frame defect generator.
///
/// Each image carries a rectangular frame band plus, per the rates,
/// scratches (thin high-priority strips), dents (elliptical darkening) and
/// bends (sheared brightness ridge), under nuisance lighting: linear
/// illumination gradient, polygonal cast shadow, per-channel color cast,
/// Gaussian noise, and a global contrast squeeze. Defect regions are
/// polygonal so the emitted annotations rasterize back to the exact masks.
struct SynthSpec {
  int count = 20;
  int side = 64;
  double scratch_rate = 0.8;
  double dent_rate = 0.6;
  double bend_rate = 0.5;
  double illumination_amplitude = 0.25;  // linear gradient, +- fraction
  double shadow_probability = 0.5;
  double shadow_darkening_min = 0.4;  // multiplicative factor range
  double shadow_darkening_max = 0.7;
  double color_cast_min = 0.85;  // per-channel gain range
  double color_cast_max = 1.15;
  double noise_sigma = 0.01;
  double contrast = 1.0;  // global squeeze toward mid-gray, (0,1]
  uint64_t seed = 0;

  void validate() const;  // throws ConfigInvalid
};

Dataset generate_synthetic(const SynthSpec& spec);

/// Emits `images/*.png`, `masks/<class>/*.png` and `annotations.json`
/// under `dir`; the annotation file loads back through load_coco.
void write_dataset(const Dataset& dataset, const std::string& dir);

}  // namespace framescope

#endif
