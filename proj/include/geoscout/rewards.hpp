#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "geoscout/core.hpp"
#include "geoscout/grammar.hpp"

namespace geoscout {

struct RewardConfig {
  double tau = 0.1;        // anomaly distance temperature
  double fmt_cap = 0.5;
  double reason_cap = 0.5;
  double acc_cap = 1.0;
  double scale_mix = 0.5;  // weight of level accuracy vs box IoU

  void validate() const;
};

struct ScaleTruth {
  std::vector<int> levels;
  std::vector<BBox> boxes;
};
struct TopoTruth {
  Permutation order;
  GridSpec grid;
};
struct AnomTruth {
  int index;
  GridSpec grid;
};
using GroundTruth = std::variant<ScaleTruth, TopoTruth, AnomTruth>;

TaskKind kind_of(const GroundTruth& gt);
// Number of answer items N the format reward is normalized by.
int answer_items(const GroundTruth& gt);
// Canonical answer string for a ground truth (answer block only).
std::string canonical_answer(const GroundTruth& gt);
// Full canonical response for a mode; reasoning mode wraps it in a stub envelope.
std::string canonical_response(const GroundTruth& gt, Mode mode);

// Ground-truth box as it reads back from its 3-decimal serialization.
RawBox canonical_box(const BBox& b);

struct ScaleScore {
  double r_val = 0.0;
  double r_box = 0.0;
  double r_acc = 0.0;
  bool arity_mismatch = false;
};

ScaleScore reward_scale(const ParsedAnswer& p, const ScaleTruth& gt, const RewardConfig& cfg);
double reward_topo(const ParsedAnswer& p, const Permutation& sigma_star);
double reward_anomaly(const ParsedAnswer& p, int k_star, const GridSpec& grid, const RewardConfig& cfg);
double reward_format(const ParsedAnswer& p, int items, const RewardConfig& cfg);
double reward_reason(const ParsedAnswer& p, Mode mode, const RewardConfig& cfg);

// Accuracy + format + (reasoning mode only) reasoning structure.
RewardBreakdown total_reward(std::string_view text, const GroundTruth& gt, Mode mode, const RewardConfig& cfg);

}  // namespace geoscout
