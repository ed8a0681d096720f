#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoscout/dataset.hpp"
#include "geoscout/rewards.hpp"

namespace geoscout {

struct Response {
  std::string id;
  std::string output;
};

// JSON-lines {"id","output"}.
std::vector<Response> read_responses(const std::filesystem::path& path);
std::vector<Response> parse_responses(std::istream& in);

enum class MissingPolicy { Zero, Error };

// Optional hook that maps a raw model output to the text handed to the
// grammar parser (e.g. an external answer extractor). Identity by default.
using AnswerExtractor = std::function<std::string(std::string_view raw, const TaskInstance& task)>;

struct CaseRow {
  std::string id;
  TaskKind kind;
  Modality modality;
  Mode mode;
  bool missing = false;
  RewardBreakdown reward;
};

struct ComponentMeans {
  std::int64_t count = 0;
  double r_acc = 0, r_fmt = 0, r_reason = 0, r_total = 0;
};

struct ScoreReport {
  std::vector<CaseRow> rows;  // manifest order
  // Headline: mean r_acc x 100 per task; unset when a task has no cases.
  std::array<std::optional<double>, 3> per_task;
  // Unweighted mean of the per-task headlines that are present.
  double avg = 0.0;
  double parse_fail_rate = 0.0;
  std::int64_t missing = 0;
  std::array<ComponentMeans, 3> components;                   // raw means per task
  std::map<std::string, ComponentMeans> cells;                // "ct/scale" -> means
};

ScoreReport score_responses(const Manifest& manifest, const std::vector<Response>& responses,
                            const RewardConfig& cfg, MissingPolicy missing = MissingPolicy::Zero,
                            const AnswerExtractor& extractor = {});

Json report_to_json(const ScoreReport& r);
std::string report_cases_csv(const ScoreReport& r);
// "scale=100.0 topo=100.0 anom=100.0" (absent tasks print "n/a")
std::string report_headline(const ScoreReport& r);

}  // namespace geoscout
