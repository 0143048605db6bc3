#include "framescope/strategy.hpp"

#include <algorithm>
#include <cctype>

namespace framescope {

namespace {
const std::string kStageCodes[kNumStages] = {"SR", "CN", "IN", "CE"};
}

const std::string& stage_code(StageId id) {
  return kStageCodes[static_cast<int>(id)];
}

std::string Strategy::label() const {
  std::string out;
  for (size_t i = 0; i < stages.size(); ++i) {
    if (i) out += "+";
    out += stage_code(stages[i]);
  }
  return out;
}

Strategy validate_strategy(const std::vector<StageId>& stages, StageParams params) {
  bool seen[kNumStages] = {false, false, false, false};
  for (StageId s : stages) {
    if (seen[static_cast<int>(s)])
      throw Error(ErrorKind::DuplicateStage,
                  "stage " + stage_code(s) + " appears twice");
    seen[static_cast<int>(s)] = true;
  }
  Strategy out;
  out.stages = stages;
  out.params = std::move(params);
  return out;
}

ImageBuffer apply_strategy(const Strategy& strategy, const ImageBuffer& image,
                           const std::string& image_id) {
  ImageBuffer current = image;
  for (StageId stage : strategy.stages) {
    switch (stage) {
      case StageId::SR:
        current = shadow_removal(current, strategy.params.shadow, image_id);
        break;
      case StageId::CN:
        current = color_neutralize(current, strategy.params.source_white,
                                   strategy.params.target_white);
        break;
      case StageId::IN:
        current = intensity_neutralize(
            current, strategy.params.msr.scaled_to(
                         std::min(current.width, current.height)));
        break;
      case StageId::CE:
        current = contrast_enhance(current);
        break;
    }
  }
  return current;
}

Strategy parse_strategy(const std::string& text, StageParams params) {
  std::vector<StageId> stages;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('+', pos);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(pos, end - pos);
    // trim spaces, uppercase
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front())))
      token.erase(token.begin());
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back())))
      token.pop_back();
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (token.empty())
      throw Error(ErrorKind::UnknownStage, "empty stage code in '" + text + "'");
    bool found = false;
    for (int i = 0; i < kNumStages; ++i) {
      if (token == kStageCodes[i]) {
        stages.push_back(static_cast<StageId>(i));
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(ErrorKind::UnknownStage, "unknown stage code: " + token);
    pos = end + 1;
  }
  return validate_strategy(stages, std::move(params));
}

}  // namespace framescope
