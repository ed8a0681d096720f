#pragma once

#include <span>
#include <string>
#include <vector>

#include "geoscout/rewards.hpp"

namespace geoscout {

// One self-contained scoring request: ground truth, mode and model output.
struct RewardItem {
  GroundTruth truth;
  Mode mode = Mode::Direct;
  std::string output;
};

// Scores every item; results are in input order. Items are independent, so
// the loop is split across OpenMP threads.
std::vector<RewardBreakdown> score_batch(std::span<const RewardItem> items, const RewardConfig& cfg);

namespace serial {
std::vector<RewardBreakdown> score_batch(std::span<const RewardItem> items, const RewardConfig& cfg);
}  // namespace serial

}  // namespace geoscout
