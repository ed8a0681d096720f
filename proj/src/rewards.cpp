#include "geoscout/rewards.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "geoscout/geometry.hpp"

namespace geoscout {

void RewardConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be > 0");
  if (!(fmt_cap > 0.0) || !(reason_cap > 0.0) || !(acc_cap > 0.0)) throw InvalidArgument("reward caps must be > 0");
  if (!(scale_mix >= 0.0 && scale_mix <= 1.0)) throw InvalidArgument("scale_mix must lie in [0,1]");
}

TaskKind kind_of(const GroundTruth& gt) {
  switch (gt.index()) {
    case 0: return TaskKind::Scale;
    case 1: return TaskKind::Topo;
    default: return TaskKind::Anom;
  }
}

int answer_items(const GroundTruth& gt) {
  if (auto* s = std::get_if<ScaleTruth>(&gt)) return static_cast<int>(s->levels.size());
  if (auto* t = std::get_if<TopoTruth>(&gt)) return t->order.size();
  return 1;
}

RawBox canonical_box(const BBox& b) {
  auto rt = [](double v) {
    const std::string s = format_decimal3(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
  };
  return {rt(b.x1()), rt(b.y1()), rt(b.x2()), rt(b.y2())};
}

std::string canonical_answer(const GroundTruth& gt) {
  if (auto* s = std::get_if<ScaleTruth>(&gt)) {
    std::vector<RawBox> boxes;
    for (const auto& b : s->boxes) boxes.push_back(b.raw());
    return format_scale_answer(s->levels, boxes);
  }
  if (auto* t = std::get_if<TopoTruth>(&gt)) return format_order_answer(t->order.mapping());
  return format_index_answer(std::get<AnomTruth>(gt).index);
}

std::string canonical_response(const GroundTruth& gt, Mode mode) {
  const std::string answer = canonical_answer(gt);
  if (mode == Mode::Direct) return answer;
  return wrap_reasoning("Compare each patch against the global anatomical layout before answering.", answer);
}

ScaleScore reward_scale(const ParsedAnswer& p, const ScaleTruth& gt, const RewardConfig& cfg) {
  ScaleScore s;
  const int n = static_cast<int>(gt.levels.size());
  if (p.kind != TaskKind::Scale || p.items != n || p.arity_mismatch || n == 0 ||
      gt.boxes.size() != gt.levels.size()) {
    s.arity_mismatch = true;
    return s;
  }
  int hits = 0;
  double iou_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& item = p.scale[static_cast<std::size_t>(i)];
    if (!item) continue;
    if (item->level == gt.levels[static_cast<std::size_t>(i)]) ++hits;
    iou_sum += bbox_iou(item->box, canonical_box(gt.boxes[static_cast<std::size_t>(i)]));
  }
  s.r_val = static_cast<double>(hits) / n;
  s.r_box = iou_sum / n;
  s.r_acc = std::min(cfg.acc_cap, cfg.scale_mix * s.r_val + (1.0 - cfg.scale_mix) * s.r_box);
  return s;
}

double reward_topo(const ParsedAnswer& p, const Permutation& sigma_star) {
  const int n = sigma_star.size();
  if (p.kind != TaskKind::Topo || n == 0) return 0.0;
  int hits = 0;
  for (int i = 0; i < n && i < static_cast<int>(p.order.size()); ++i) {
    const auto& v = p.order[static_cast<std::size_t>(i)];
    if (v && *v == sigma_star[i]) ++hits;
  }
  return static_cast<double>(hits) / n;
}

double reward_anomaly(const ParsedAnswer& p, int k_star, const GridSpec& grid, const RewardConfig& cfg) {
  if (p.kind != TaskKind::Anom || !p.index || *p.index < 0 || *p.index >= grid.cells()) return 0.0;
  const GridCoord g = flat_to_grid(*p.index, grid);
  const GridCoord t = flat_to_grid(k_star, grid);
  const double du = g.u - t.u, dv = g.v - t.v;
  return std::exp(-std::sqrt(du * du + dv * dv) / cfg.tau);
}

double reward_format(const ParsedAnswer& p, int items, const RewardConfig& cfg) {
  if (items <= 0 || p.items != items) return 0.0;
  return cfg.fmt_cap * p.valid_count() / items;
}

double reward_reason(const ParsedAnswer& p, Mode mode, const RewardConfig& cfg) {
  return mode == Mode::Reasoning && p.cot_structure_ok ? cfg.reason_cap : 0.0;
}

RewardBreakdown total_reward(std::string_view text, const GroundTruth& gt, Mode mode, const RewardConfig& cfg) {
  const TaskKind kind = kind_of(gt);
  const int n = answer_items(gt);
  const ParsedAnswer p = parse_answer(text, kind, n, mode);
  RewardBreakdown r;
  double acc = 0.0;
  switch (kind) {
    case TaskKind::Scale: {
      const ScaleScore s = reward_scale(p, std::get<ScaleTruth>(gt), cfg);
      acc = s.r_acc;
      r.sub_components["r_val"] = s.r_val;
      r.sub_components["r_box"] = s.r_box;
      break;
    }
    case TaskKind::Topo:
      acc = reward_topo(p, std::get<TopoTruth>(gt).order);
      r.sub_components["r_topo"] = acc;
      break;
    case TaskKind::Anom: {
      const auto& a = std::get<AnomTruth>(gt);
      acc = reward_anomaly(p, a.index, a.grid, cfg);
      r.sub_components["r_anom"] = acc;
      break;
    }
  }
  r.arity_mismatch = p.arity_mismatch;
  r.r_acc = std::clamp(acc, 0.0, cfg.acc_cap);
  r.r_fmt = std::min(reward_format(p, n, cfg), cfg.fmt_cap);
  r.r_reason = reward_reason(p, mode, cfg);
  r.r_total = r.r_acc + r.r_fmt + (mode == Mode::Reasoning ? r.r_reason : 0.0);
  r.parse_ok = p.all_valid() && !p.arity_mismatch;
  return r;
}

}  // namespace geoscout
