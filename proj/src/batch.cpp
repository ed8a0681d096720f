#include "geoscout/batch.hpp"

namespace geoscout {

std::vector<RewardBreakdown> score_batch(std::span<const RewardItem> items, const RewardConfig& cfg) {
  cfg.validate();
  std::vector<RewardBreakdown> out(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& it = items[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = total_reward(it.output, it.truth, it.mode, cfg);
  }
  return out;
}

namespace serial {
std::vector<RewardBreakdown> score_batch(std::span<const RewardItem> items, const RewardConfig& cfg) {
  cfg.validate();
  std::vector<RewardBreakdown> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(total_reward(it.output, it.truth, it.mode, cfg));
  return out;
}
}  // namespace serial

}  // namespace geoscout
