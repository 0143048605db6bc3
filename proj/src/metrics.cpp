#include "framescope/metrics.hpp"

namespace framescope {

std::optional<double> iou(const BinaryPlane& pred, const BinaryPlane& truth) {
  if (pred.width != truth.width || pred.height != truth.height)
    throw Error(ErrorKind::DimensionMismatch, "IoU planes differ in size");
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] != 0;
    const bool t = truth.data[i] != 0;
    inter += (p && t);
    uni += (p || t);
  }
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

MeanIoUResult mean_iou(const std::vector<MaskSet>& predictions,
                       const std::vector<MaskSet>& truths,
                       const std::vector<ClassId>& classes) {
  if (predictions.size() != truths.size())
    throw Error(ErrorKind::DimensionMismatch,
                "prediction/truth lists differ in length");
  MeanIoUResult result;
  double overall = 0.0;
  int counted_classes = 0;
  for (ClassId cls : classes) {
    ClassIoU entry;
    entry.class_id = cls;
    double sum = 0.0;
    for (size_t i = 0; i < predictions.size(); ++i) {
      const auto v = iou(predictions[i].plane(cls), truths[i].plane(cls));
      if (v) {
        sum += *v;
        ++entry.support;
      }
    }
    if (entry.support > 0) {
      entry.iou = sum / entry.support;
      overall += entry.iou;
      ++counted_classes;
    }
    result.per_class.push_back(entry);
  }
  if (counted_classes == 0)
    throw Error(ErrorKind::EmptyEvaluation, "IoU undefined for every class");
  result.overall = overall / counted_classes;
  return result;
}

double improvement_pct(double baseline, double treatment) {
  if (!(baseline > 0.0))
    throw Error(ErrorKind::ZeroBaseline, "baseline must be > 0");
  return (treatment - baseline) / baseline * 100.0;
}

double mean_improvement(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty())
    throw Error(ErrorKind::EmptyEvaluation, "no pairs to average");
  double sum = 0.0;
  for (const auto& [baseline, treatment] : pairs)
    sum += improvement_pct(baseline, treatment);
  return sum / pairs.size();
}

}  // namespace framescope
