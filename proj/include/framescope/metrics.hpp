#ifndef FRAMESCOPE_METRICS_HPP
#define FRAMESCOPE_METRICS_HPP

#include <optional>
#include <vector>

#include "framescope/image.hpp"

namespace framescope {

struct ClassIoU {
  ClassId class_id = ClassId::WindowFrame;
  double iou = 0.0;
  int support = 0;  // images where the IoU was defined
};

/// Intersection over union; nullopt when both planes are empty.
std::optional<double> iou(const BinaryPlane& pred, const BinaryPlane& truth);

struct MeanIoUResult {
  std::vector<ClassIoU> per_class;
  double overall = 0.0;  // mean over classes with support > 0
};

/// Macro aggregation: per class, the mean of defined per-image IoUs;
/// undefined pairs drop out of the support. Overall averages classes with
/// nonzero support. Throws EmptyEvaluation when nothing is defined.
MeanIoUResult mean_iou(const std::vector<MaskSet>& predictions,
                       const std::vector<MaskSet>& truths,
                       const std::vector<ClassId>& classes);

/// (treatment - baseline) / baseline * 100. Throws ZeroBaseline.
double improvement_pct(double baseline, double treatment);

/// Arithmetic mean of improvement_pct over the pairs.
double mean_improvement(const std::vector<std::pair<double, double>>& pairs);

}  // namespace framescope

#endif
