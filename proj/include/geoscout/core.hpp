#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoscout/error.hpp"

namespace geoscout {

// Normalized box; construction validates 0 <= x1 < x2 <= 1 (same for y).
// Model predictions that violate this are kept as RawBox instead.
struct RawBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  bool degenerate() const { return !(x1 < x2) || !(y1 < y2); }
  friend bool operator==(const RawBox&, const RawBox&) = default;
};

class BBox {
 public:
  BBox(double x1, double y1, double x2, double y2);
  double x1() const { return b_.x1; }
  double y1() const { return b_.y1; }
  double x2() const { return b_.x2; }
  double y2() const { return b_.y2; }
  double area() const { return (b_.x2 - b_.x1) * (b_.y2 - b_.y1); }
  const RawBox& raw() const { return b_; }
  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  RawBox b_;
};

class GridSpec {
 public:
  GridSpec(int rows, int cols);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cells() const { return rows_ * cols_; }
  std::string str() const;  // "RxC"
  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int rows_;
  int cols_;
};

struct GridCoord {
  int u = 0;  // row
  int v = 0;  // column
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);
  static Permutation identity(int n);
  int size() const { return static_cast<int>(map_.size()); }
  int operator[](int i) const { return map_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& mapping() const { return map_; }
  bool is_identity() const;
  // (p * q)[i] = p[q[i]]
  Permutation compose(const Permutation& q) const;
  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> map_;
};

enum class Modality { CT, MRI, XRAY };
enum class TaskKind { Scale, Topo, Anom };
enum class Mode { Direct, Reasoning };
enum class Difficulty { Easy, Medium, Hard };

constexpr bool is_volumetric(Modality m) { return m == Modality::CT || m == Modality::MRI; }

std::string_view to_string(Modality m);
std::string_view to_string(TaskKind k);
std::string_view to_string(Mode m);
std::string_view to_string(Difficulty d);
Modality parse_modality(std::string_view s);
TaskKind parse_task_kind(std::string_view s);  // throws UnknownTaskKind
Mode parse_mode(std::string_view s);
Difficulty parse_difficulty(std::string_view s);

inline constexpr std::array<Modality, 3> kModalities{Modality::CT, Modality::MRI, Modality::XRAY};
inline constexpr std::array<TaskKind, 3> kTaskKinds{TaskKind::Scale, TaskKind::Topo, TaskKind::Anom};

// Per-difficulty task geometry. HARD is the standard configuration.
struct DifficultyParams {
  int scale_patches;
  GridSpec jigsaw_grid;
  GridSpec anomaly_grid;
  std::vector<int> anomaly_centers;
};
DifficultyParams difficulty_params(Difficulty d);

struct RewardBreakdown {
  double r_acc = 0.0;
  double r_fmt = 0.0;
  double r_reason = 0.0;
  double r_total = 0.0;
  bool parse_ok = false;
  bool arity_mismatch = false;
  std::map<std::string, double> sub_components;
  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

}  // namespace geoscout
