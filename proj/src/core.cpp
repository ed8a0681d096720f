#include "geoscout/core.hpp"

#include <algorithm>
#include <cmath>

namespace geoscout {

BBox::BBox(double x1, double y1, double x2, double y2) : b_{x1, y1, x2, y2} {
  const bool ok = std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
                  0.0 <= x1 && x1 < x2 && x2 <= 1.0 && 0.0 <= y1 && y1 < y2 && y2 <= 1.0;
  if (!ok) throw InvalidArgument("bbox must satisfy 0 <= x1 < x2 <= 1 and 0 <= y1 < y2 <= 1");
}

GridSpec::GridSpec(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1 || rows * cols < 2)
    throw InvalidArgument("grid needs rows >= 1, cols >= 1 and at least 2 cells");
}

std::string GridSpec::str() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

Permutation::Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
  std::vector<bool> seen(map_.size(), false);
  for (int v : map_) {
    if (v < 0 || static_cast<std::size_t>(v) >= map_.size() || seen[static_cast<std::size_t>(v)])
      throw InvalidArgument("not a permutation of 0..n-1");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
  return Permutation(std::move(m));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] != static_cast<int>(i)) return false;
  return true;
}

Permutation Permutation::compose(const Permutation& q) const {
  if (q.size() != size()) throw InvalidArgument("composing permutations of different length");
  std::vector<int> out(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) out[i] = map_[static_cast<std::size_t>(q.map_[i])];
  return Permutation(std::move(out));
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::CT: return "ct";
    case Modality::MRI: return "mri";
    case Modality::XRAY: return "xray";
  }
  return "?";
}

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Scale: return "scale";
    case TaskKind::Topo: return "topo";
    case TaskKind::Anom: return "anom";
  }
  return "?";
}

std::string_view to_string(Mode m) { return m == Mode::Direct ? "direct" : "reasoning"; }

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

Modality parse_modality(std::string_view s) {
  if (s == "ct") return Modality::CT;
  if (s == "mri") return Modality::MRI;
  if (s == "xray") return Modality::XRAY;
  throw InvalidArgument("unknown modality '" + std::string(s) + "'");
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "scale") return TaskKind::Scale;
  if (s == "topo") return TaskKind::Topo;
  if (s == "anom") return TaskKind::Anom;
  throw UnknownTaskKind("'" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "direct") return Mode::Direct;
  if (s == "reasoning") return Mode::Reasoning;
  throw InvalidArgument("unknown mode '" + std::string(s) + "'");
}

Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  throw InvalidArgument("unknown difficulty '" + std::string(s) + "'");
}

DifficultyParams difficulty_params(Difficulty d) {
  switch (d) {
    case Difficulty::Easy:
      return {1, GridSpec(1, 2), GridSpec(2, 2), {0, 1, 2, 3}};
    case Difficulty::Medium:
      // 4 rows x 2 cols; the middle two rows are the central region.
      return {2, GridSpec(1, 4), GridSpec(4, 2), {2, 3, 4, 5}};
    case Difficulty::Hard:
      return {3, GridSpec(2, 2), GridSpec(4, 4), {5, 6, 9, 10}};
  }
  throw InvalidArgument("difficulty");
}

}  // namespace geoscout
