#ifndef FRAMESCOPE_SWEEP_HPP
#define FRAMESCOPE_SWEEP_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "framescope/dataio.hpp"
#include "framescope/segnet.hpp"
#include "framescope/strategy.hpp"

namespace framescope {

/// All 2^n subsets of the given stages, each in canonical SR < CN < IN < CE
/// order, sorted by size then lexicographically. Includes the empty baseline.
std::vector<Strategy> enumerate_subsets(const std::vector<StageId>& stages);

/// All n! orderings of a non-empty strategy, lexicographic by stage codes.
std::vector<Strategy> enumerate_permutations(const Strategy& strategy);

struct SweepConfig {
  enum class Mode { Subsets, Permutations };
  Mode mode = Mode::Subsets;
  Strategy permutation_base;  // Permutations mode only
  StageParams stage_params;
  SegConfig seg;
  TrainConfig train;
  int train_count = 0;  // 0 = derive 60/20/20-style proportions from size
  int val_count = 0;
  int test_count = 0;
  uint64_t split_seed = 0;
  std::string cache_dir;  // empty = no cache
  int jobs = 1;
};

struct StrategyResult {
  Strategy strategy;
  bool failed = false;
  std::string error;
  std::array<double, kNumClasses> test_iou = {0, 0, 0, 0};  // by ClassId
  std::array<bool, kNumClasses> test_iou_defined = {false, false, false, false};
  double test_mean_iou = 0.0;
  double val_best_miou = 0.0;
  double loss_at_best = 0.0;
};

struct SweepReport {
  SweepConfig::Mode mode = SweepConfig::Mode::Subsets;
  std::string config_digest;
  std::vector<StrategyResult> rows;
  int baseline_index = -1;  // Subsets mode: the empty strategy's row
  /// Per class: (strategy label, IoU delta vs. baseline), sorted descending.
  std::array<std::vector<std::pair<std::string, double>>, kNumClasses> deltas;
  /// Permutations mode: per class, max - min IoU across orderings.
  std::array<double, kNumClasses> spreads = {0, 0, 0, 0};
  std::vector<std::string> notes;
};

/// Trains and evaluates one fresh model per strategy, every model from the
/// same initialization seed. Per-strategy failures are recorded, not fatal.
/// Deterministic for any `jobs` count.
SweepReport run_sweep(const SweepConfig& cfg, const Dataset& dataset);

/// Recomputes per-class deltas vs. the baseline row (Subsets mode).
void impact_table(SweepReport& report);

/// Per-class max - min across a set of per-ordering IoUs.
std::array<double, kNumClasses> order_spread(
    const std::vector<std::array<double, kNumClasses>>& per_ordering);

/// Content hash of (image bytes, strategy encoding, stage parameters) used
/// as the preprocessing cache key.
uint64_t preprocess_cache_key(const ImageBuffer& image, const Strategy& strategy);

/// Cached apply_strategy: raw-double dump under cache_dir keyed by content.
ImageBuffer apply_strategy_cached(const Strategy& strategy, const ImageBuffer& image,
                                  const std::string& image_id,
                                  const std::string& cache_dir);

/// Serialization of the report (stable key order, byte-deterministic).
std::string report_to_json(const SweepReport& report);
/// Inverse of report_to_json (strategy params are not round-tripped).
SweepReport report_from_json(const std::string& text);
std::string report_to_csv(const SweepReport& report);
/// One bar chart per class of delta-vs-baseline, written as SVG files
/// `impact_<class>.svg` under `dir`.
void write_impact_charts(const SweepReport& report, const std::string& dir);

}  // namespace framescope

#endif
