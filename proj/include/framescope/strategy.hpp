#ifndef FRAMESCOPE_STRATEGY_HPP
#define FRAMESCOPE_STRATEGY_HPP

#include <string>
#include <vector>

#include "framescope/image.hpp"
#include "framescope/ipt.hpp"

namespace framescope {

/// The four preprocessing stages, in canonical order.
enum class StageId : int {
  SR = 0,  // shadow removal
  CN = 1,  // color neutralization
  IN = 2,  // intensity neutralization
  CE = 3,  // contrast enhancement
};

inline constexpr int kNumStages = 4;

const std::string& stage_code(StageId id);

/// Ordered, duplicate-free sequence of stages plus their parameters.
/// The empty sequence is the no-preprocessing baseline.
struct Strategy {
  std::vector<StageId> stages;
  StageParams params;

  bool empty() const { return stages.empty(); }

  /// "SR+CN" style label; empty strategy formats as "".
  std::string label() const;

  bool operator==(const Strategy& o) const { return stages == o.stages; }
};

/// Checks the duplicate-free invariant and wraps the list into a Strategy.
Strategy validate_strategy(const std::vector<StageId>& stages,
                           StageParams params = {});

/// Left-to-right composition of the stage transforms. `image_id` is only
/// consulted by an External shadow backend.
ImageBuffer apply_strategy(const Strategy& strategy, const ImageBuffer& image,
                           const std::string& image_id = "");

/// Parses "SR+CN+IN+CE" style labels, case-insensitive. "" is the baseline.
Strategy parse_strategy(const std::string& text, StageParams params = {});

}  // namespace framescope

#endif
