#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoscout/catalog.hpp"
#include "geoscout/embedding.hpp"
#include "geoscout/rewards.hpp"
#include "geoscout/taskgen.hpp"
#include "json.hpp"

namespace geoscout {

using Json = nlohmann::ordered_json;

// Generator parameters. Its JSON form is both the per-record "spec" snapshot
// (restricted to the record's task) and the CLI --config file format.
struct GenConfig {
  ScaleTaskSpec scale;
  GridSpec jigsaw_grid{2, 2};
  AnomalyTaskSpec anomaly;

  static GenConfig for_difficulty(Difficulty d);
  void validate() const;
};

Json to_json(const GenConfig& cfg);
Json task_spec_json(const GenConfig& cfg, TaskKind kind);
// Overlay the keys present in `j` onto `base`.
GenConfig apply_config_json(GenConfig base, const Json& j);

Json truth_to_json(const GroundTruth& gt);
GroundTruth truth_from_json(TaskKind kind, const Json& j);

bool operator==(const ScaleTruth& a, const ScaleTruth& b);
bool operator==(const TopoTruth& a, const TopoTruth& b);
bool operator==(const AnomTruth& a, const AnomTruth& b);

struct TaskInstance {
  std::string id;
  TaskKind kind = TaskKind::Topo;
  Modality modality = Modality::CT;
  Difficulty difficulty = Difficulty::Hard;
  Mode mode = Mode::Direct;
  std::vector<std::string> images;  // relative to the manifest directory
  std::string prompt;
  GroundTruth ground_truth = AnomTruth{0, GridSpec(4, 4)};
  std::uint64_t seed = 0;
  Json spec;
  std::string source_id;
  std::string reference_id;  // anomaly tasks only

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

// Per-(modality, task) case counts. Weights are integers so apportionment
// is exact; the default is equal modalities and tasks at 1:3:2.
struct CompositionQuota {
  std::int64_t total = 0;
  std::array<std::int64_t, 3> modality_weights{1, 1, 1};
  std::array<std::int64_t, 3> task_weights{1, 3, 2};

  // cells[m][t], indexed like kModalities x kTaskKinds. Largest-remainder
  // apportionment; ties go to the earlier cell.
  std::array<std::array<std::int64_t, 3>, 3> cells() const;
  std::int64_t task_total(TaskKind k) const;
  std::int64_t modality_total(Modality m) const;
  friend bool operator==(const CompositionQuota&, const CompositionQuota&) = default;
};

enum class ModePolicy { Direct, Reasoning, Split };
std::string_view to_string(ModePolicy p);
ModePolicy parse_mode_policy(std::string_view s);

struct Manifest {
  std::string dataset_id;
  CompositionQuota quota;
  std::uint64_t seed = 0;
  std::string tool_version;
  Difficulty difficulty = Difficulty::Hard;
  ModePolicy mode_policy = ModePolicy::Direct;
  Json config;
  std::vector<TaskInstance> records;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string render_prompt(const GroundTruth& shape, const GenConfig& cfg, Mode mode);
std::string render_gt_answer(const GroundTruth& gt, Mode mode);

struct AssembleOptions {
  std::optional<std::filesystem::path> out_dir;  // PNG side-files go to out_dir/images
  const EmbeddingIndex* index = nullptr;           // X-ray reference retrieval
  CatalogReferenceProvider::Loader loader;         // defaults to read_png
  std::string dataset_id = "geoscout";
};

struct SkipRecord {
  std::string source_id;
  TaskKind kind;
  std::string reason;
};

struct Shortfall {
  Modality modality;
  TaskKind kind;
  std::int64_t wanted;
  std::int64_t filled;
};

struct AssemblyResult {
  Manifest manifest;
  std::vector<SkipRecord> skips;
  std::vector<Shortfall> shortfalls;
};

// Fills every (modality, task) cell, sampling sources without replacement;
// failed generations are skipped and replaced. Never throws for shortfalls.
AssemblyResult assemble_cells(const SourceCatalog& catalog, const CompositionQuota& quota, const GenConfig& cfg,
                              Difficulty difficulty, ModePolicy policy, std::uint64_t seed,
                              const AssembleOptions& opts = {});

// As assemble_cells, but throws InsufficientSources if any cell is underfilled.
Manifest assemble(const SourceCatalog& catalog, const CompositionQuota& quota, const GenConfig& cfg,
                  Difficulty difficulty, ModePolicy policy, std::uint64_t seed, const AssembleOptions& opts = {});

// Regenerates one record's ground truth from its stored seed and spec.
GroundTruth regenerate_truth(const TaskInstance& rec, const SourceCatalog& catalog, const AssembleOptions& opts = {});

Json to_json(const TaskInstance& t);
TaskInstance instance_from_json(const Json& j);

// First line: header metadata; then one TaskInstance per line.
void write_jsonl(const Manifest& m, const std::filesystem::path& path);
std::string to_jsonl(const Manifest& m);
Manifest read_jsonl(const std::filesystem::path& path);
Manifest parse_jsonl(std::istream& in);

}  // namespace geoscout
