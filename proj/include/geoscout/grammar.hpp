#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoscout/core.hpp"

namespace geoscout {

// Canonical answer grammar (case-insensitive, whitespace-tolerant):
//   scale : one line per patch   "patch <i>: level=<1|2> box=[x1,y1,x2,y2]"  (i is 1-based)
//   topo  : "order=[a,b,c,...]"  (brackets optional)
//   anom  : "index=<k>"
// Reasoning envelope: "<think>...</think><answer>...</answer>", exactly one of
// each block and nothing but whitespace around them.

struct ScaleItem {
  int level = 0;
  RawBox box;
};

struct ParsedAnswer {
  TaskKind kind = TaskKind::Topo;
  int items = 0;                   // N expected by the task
  std::vector<bool> item_validity;  // size == items
  std::vector<std::optional<ScaleItem>> scale;  // scale only
  std::vector<std::optional<int>> order;         // topo only
  std::optional<int> index;                      // anom only
  bool cot_structure_ok = false;
  bool arity_mismatch = false;
  std::string body;  // text the items were parsed from

  int valid_count() const;
  bool all_valid() const { return valid_count() == items; }
};

// Answer block of a well-formed think/answer envelope, or nullopt.
std::optional<std::string_view> match_cot_envelope(std::string_view text);

// Total: any input yields a ParsedAnswer; failures only clear validity flags.
ParsedAnswer parse_answer(std::string_view text, TaskKind kind, int items, Mode mode);

// Canonical serializations accepted by parse_answer with every item valid.
std::string format_decimal3(double v);
std::string format_scale_answer(const std::vector<int>& levels, const std::vector<RawBox>& boxes);
std::string format_order_answer(const std::vector<int>& order);
std::string format_index_answer(int index);
std::string wrap_reasoning(std::string_view think, std::string_view answer);

}  // namespace geoscout
