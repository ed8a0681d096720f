#include "geoscout/dataset.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>

#include "geoscout/rng.hpp"

namespace geoscout {

// ---------------------------------------------------------------------------
// Config snapshots
// ---------------------------------------------------------------------------

GenConfig GenConfig::for_difficulty(Difficulty d) {
  const DifficultyParams p = difficulty_params(d);
  GenConfig c;
  c.scale.num_patches = p.scale_patches;
  c.jigsaw_grid = p.jigsaw_grid;
  c.anomaly.grid = p.anomaly_grid;
  c.anomaly.centers = p.anomaly_centers;
  return c;
}

void GenConfig::validate() const {
  scale.validate();
  anomaly.validate();
}

namespace {

Json grid_json(const GridSpec& g) { return Json{{"rows", g.rows()}, {"cols", g.cols()}}; }
GridSpec grid_from(const Json& j) { return GridSpec(j.at("rows").get<int>(), j.at("cols").get<int>()); }

Json scale_json(const ScaleTaskSpec& s) {
  Json j;
  j["num_patches"] = s.num_patches;
  j["ratios"] = s.ratios;
  j["roi"] = {s.roi_min, s.roi_max};
  if (s.resize_target)
    j["resize"] = {s.resize_target->first, s.resize_target->second};
  else
    j["resize"] = nullptr;
  return j;
}

Json anomaly_json(const AnomalyTaskSpec& a) {
  Json j;
  j["grid"] = grid_json(a.grid);
  j["centers"] = a.centers;
  j["noise_sigma"] = a.noise_sigma;
  j["boundary_width"] = a.boundary_width;
  j["slice_offset"] = a.slice_offset;
  return j;
}

}  // namespace

Json to_json(const GenConfig& cfg) {
  Json j;
  j["scale"] = scale_json(cfg.scale);
  j["jigsaw"] = Json{{"grid", grid_json(cfg.jigsaw_grid)}};
  j["anomaly"] = anomaly_json(cfg.anomaly);
  return j;
}

Json task_spec_json(const GenConfig& cfg, TaskKind kind) {
  Json j;
  switch (kind) {
    case TaskKind::Scale: j["scale"] = scale_json(cfg.scale); break;
    case TaskKind::Topo: j["jigsaw"] = Json{{"grid", grid_json(cfg.jigsaw_grid)}}; break;
    case TaskKind::Anom: j["anomaly"] = anomaly_json(cfg.anomaly); break;
  }
  return j;
}

GenConfig apply_config_json(GenConfig c, const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  if (j.contains("scale")) {
    const auto& s = j["scale"];
    if (s.contains("num_patches")) c.scale.num_patches = s["num_patches"].get<int>();
    if (s.contains("ratios")) c.scale.ratios = s["ratios"].get<std::vector<double>>();
    if (s.contains("roi")) {
      const auto roi = s["roi"].get<std::vector<double>>();
      if (roi.size() != 2) throw InvalidArgument("scale.roi needs two values");
      c.scale.roi_min = roi[0];
      c.scale.roi_max = roi[1];
    }
    if (s.contains("resize")) {
      if (s["resize"].is_null()) {
        c.scale.resize_target.reset();
      } else {
        const auto r = s["resize"].get<std::vector<int>>();
        if (r.size() != 2) throw InvalidArgument("scale.resize needs [width,height]");
        c.scale.resize_target = std::make_pair(r[0], r[1]);
      }
    }
  }
  if (j.contains("jigsaw") && j["jigsaw"].contains("grid")) c.jigsaw_grid = grid_from(j["jigsaw"]["grid"]);
  if (j.contains("anomaly")) {
    const auto& a = j["anomaly"];
    if (a.contains("grid")) c.anomaly.grid = grid_from(a["grid"]);
    if (a.contains("centers")) c.anomaly.centers = a["centers"].get<std::vector<int>>();
    if (a.contains("noise_sigma")) c.anomaly.noise_sigma = a["noise_sigma"].get<double>();
    if (a.contains("boundary_width")) c.anomaly.boundary_width = a["boundary_width"].get<int>();
    if (a.contains("slice_offset")) c.anomaly.slice_offset = a["slice_offset"].get<int>();
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

bool operator==(const ScaleTruth& a, const ScaleTruth& b) { return a.levels == b.levels && a.boxes == b.boxes; }
bool operator==(const TopoTruth& a, const TopoTruth& b) { return a.order == b.order && a.grid == b.grid; }
bool operator==(const AnomTruth& a, const AnomTruth& b) { return a.index == b.index && a.grid == b.grid; }

Json truth_to_json(const GroundTruth& gt) {
  Json j;
  if (auto* s = std::get_if<ScaleTruth>(&gt)) {
    j["levels"] = s->levels;
    Json boxes = Json::array();
    for (const auto& b : s->boxes) boxes.push_back({b.x1(), b.y1(), b.x2(), b.y2()});
    j["boxes"] = boxes;
  } else if (auto* t = std::get_if<TopoTruth>(&gt)) {
    j["order"] = t->order.mapping();
    j["grid"] = grid_json(t->grid);
  } else {
    const auto& a = std::get<AnomTruth>(gt);
    j["index"] = a.index;
    j["grid"] = grid_json(a.grid);
  }
  return j;
}

GroundTruth truth_from_json(TaskKind kind, const Json& j) {
  switch (kind) {
    case TaskKind::Scale: {
      ScaleTruth s;
      s.levels = j.at("levels").get<std::vector<int>>();
      for (const auto& b : j.at("boxes")) {
        const auto v = b.get<std::vector<double>>();
        if (v.size() != 4) throw InvalidArgument("box needs four coordinates");
        s.boxes.emplace_back(v[0], v[1], v[2], v[3]);
      }
      if (s.levels.size() != s.boxes.size() || s.levels.empty())
        throw InvalidArgument("levels and boxes must be non-empty and equally long");
      for (int l : s.levels)
        if (l < 1) throw InvalidArgument("scale levels are 1-based");
      return s;
    }
    case TaskKind::Topo: {
      const GridSpec g = grid_from(j.at("grid"));
      Permutation p(j.at("order").get<std::vector<int>>());
      if (p.size() != g.cells()) throw InvalidArgument("order length does not match grid");
      return TopoTruth{std::move(p), g};
    }
    case TaskKind::Anom: {
      const GridSpec g = grid_from(j.at("grid"));
      const int k = j.at("index").get<int>();
      if (k < 0 || k >= g.cells()) throw InvalidArgument("index outside grid");
      return AnomTruth{k, g};
    }
  }
  throw UnknownTaskKind("?");
}

// ---------------------------------------------------------------------------
// Quota
// ---------------------------------------------------------------------------

std::array<std::array<std::int64_t, 3>, 3> CompositionQuota::cells() const {
  if (total < 0) throw InvalidArgument("quota total must be >= 0");
  const std::int64_t ms = std::accumulate(modality_weights.begin(), modality_weights.end(), std::int64_t{0});
  const std::int64_t ts = std::accumulate(task_weights.begin(), task_weights.end(), std::int64_t{0});
  for (auto w : modality_weights)
    if (w < 0) throw InvalidArgument("negative modality weight");
  for (auto w : task_weights)
    if (w < 0) throw InvalidArgument("negative task weight");
  if (ms <= 0 || ts <= 0) throw InvalidArgument("share weights must sum to a positive value");
  const std::int64_t denom = ms * ts;
  std::array<std::array<std::int64_t, 3>, 3> out{};
  struct Rem {
    std::int64_t rem;
    int cell;
  };
  std::vector<Rem> rems;
  std::int64_t assigned = 0;
  for (int m = 0; m < 3; ++m)
    for (int t = 0; t < 3; ++t) {
      const std::int64_t num = total * modality_weights[static_cast<std::size_t>(m)] * task_weights[static_cast<std::size_t>(t)];
      out[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] = num / denom;
      assigned += num / denom;
      rems.push_back({num % denom, m * 3 + t});
    }
  std::stable_sort(rems.begin(), rems.end(), [](const Rem& a, const Rem& b) { return a.rem > b.rem; });
  for (std::int64_t left = total - assigned, i = 0; left > 0; --left, ++i) {
    const int c = rems[static_cast<std::size_t>(i)].cell;
    ++out[static_cast<std::size_t>(c / 3)][static_cast<std::size_t>(c % 3)];
  }
  return out;
}

std::int64_t CompositionQuota::task_total(TaskKind k) const {
  const auto c = cells();
  std::int64_t s = 0;
  for (int m = 0; m < 3; ++m) s += c[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
  return s;
}

std::int64_t CompositionQuota::modality_total(Modality m) const {
  const auto c = cells()[static_cast<std::size_t>(m)];
  return c[0] + c[1] + c[2];
}

std::string_view to_string(ModePolicy p) {
  switch (p) {
    case ModePolicy::Direct: return "direct";
    case ModePolicy::Reasoning: return "reasoning";
    case ModePolicy::Split: return "split";
  }
  return "?";
}

ModePolicy parse_mode_policy(std::string_view s) {
  if (s == "direct") return ModePolicy::Direct;
  if (s == "reasoning") return ModePolicy::Reasoning;
  if (s == "split") return ModePolicy::Split;
  throw InvalidArgument("unknown mode policy '" + std::string(s) + "' (direct|reasoning|split)");
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

namespace {

std::string percent(double r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << r * 100.0 << "%";
  return os.str();
}

}  // namespace

std::string render_prompt(const GroundTruth& shape, const GenConfig& cfg, Mode mode) {
  std::string p;
  switch (kind_of(shape)) {
    case TaskKind::Scale: {
      const int n = answer_items(shape);
      for (int i = 0; i <= n; ++i) p += "<image>\n";
      p += "The first image is the global view of a medical scan. The next " + std::to_string(n) +
           (n == 1 ? " image is a square patch" : " images are square patches") +
           " cropped from it and resized to the same resolution.\n"
           "For each patch, identify its scale level (";
      for (std::size_t i = 0; i < cfg.scale.ratios.size(); ++i) {
        if (i) p += "; ";
        p += "level " + std::to_string(i + 1) + ": the patch covers " + percent(cfg.scale.ratios[i]) +
             " of the image area";
      }
      p += ") and its normalized bounding box (x1, y1, x2, y2) in the global image, with coordinates in [0, 1].\n"
           "Answer with one line per patch, in order: patch <i>: level=<level> box=[x1,y1,x2,y2]";
      break;
    }
    case TaskKind::Topo: {
      const auto& g = std::get<TopoTruth>(shape).grid;
      p += "<image>\n";
      p += "This medical image was divided into a " + std::to_string(g.rows()) + " x " + std::to_string(g.cols()) +
           " grid of patches, numbered 0 to " + std::to_string(g.cells() - 1) +
           " in reading order (left to right, top to bottom), and the patches were shuffled.\n"
           "For each position of the shuffled image, in reading order, give the number of the original patch "
           "shown there.\n"
           "Answer in the form: order=[a,b,...]";
      break;
    }
    case TaskKind::Anom: {
      const auto& g = std::get<AnomTruth>(shape).grid;
      p += "<image>\n";
      p += "This medical image is divided into a " + std::to_string(g.rows()) + " x " + std::to_string(g.cols()) +
           " grid of cells, numbered 0 to " + std::to_string(g.cells() - 1) +
           " in reading order (left to right, top to bottom). One cell in the central region was replaced by the "
           "same region of a different but similar scan.\n"
           "Identify the inconsistent cell.\n"
           "Answer in the form: index=<k>";
      break;
    }
  }
  if (mode == Mode::Reasoning)
    p += "\nFirst reason step by step inside <think></think> tags, then give only the final answer inside "
         "<answer></answer> tags.";
  else
    p += "\nOutput only the final answer.";
  return p;
}

std::string render_gt_answer(const GroundTruth& gt, Mode mode) { return canonical_response(gt, mode); }

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

struct CellOutput {
  std::vector<TaskInstance> records;
  std::vector<SkipRecord> skips;
  std::int64_t filled = 0;
  std::exception_ptr fatal;
};

std::string case_id(Modality m, TaskKind k, std::int64_t j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05lld", static_cast<long long>(j));
  return std::string(to_string(m)) + "-" + std::string(to_string(k)) + "-" + buf;
}

struct Generated {
  GroundTruth truth;
  std::vector<std::pair<std::string, ImageBuffer>> images;  // (suffix, image)
  std::string reference_id;
};

Generated generate_case(const SourceRecord& src, TaskKind kind, const GenConfig& cfg, std::uint64_t seed,
                        const SourceCatalog& catalog, const AssembleOptions& opts,
                        const CatalogReferenceProvider::Loader& loader) {
  const ImageBuffer img = loader(src);
  Generated g{AnomTruth{0, GridSpec(1, 2)}, {}, {}};
  switch (kind) {
    case TaskKind::Scale: {
      ScaleTask t = gen_scale_task(img, cfg.scale, seed);
      g.truth = ScaleTruth{t.levels, t.boxes};
      g.images.emplace_back("_global", std::move(t.global));
      for (std::size_t i = 0; i < t.patches.size(); ++i)
        g.images.emplace_back("_p" + std::to_string(i + 1), std::move(t.patches[i]));
      break;
    }
    case TaskKind::Topo: {
      JigsawTask t = gen_jigsaw_task(img, cfg.jigsaw_grid, seed);
      g.truth = TopoTruth{t.sigma, t.grid};
      g.images.emplace_back("", std::move(t.shuffled));
      break;
    }
    case TaskKind::Anom: {
      static const EmbeddingIndex kEmpty;
      CatalogReferenceProvider refs(catalog, opts.index ? *opts.index : kEmpty, cfg.anomaly.slice_offset, loader);
      AnomalyTask t = gen_anomaly_task(img, src, cfg.anomaly, refs, seed);
      g.truth = AnomTruth{t.k_star, t.grid};
      g.reference_id = t.reference_id;
      g.images.emplace_back("", std::move(t.corrupted));
      break;
    }
  }
  return g;
}

CatalogReferenceProvider::Loader effective_loader(const AssembleOptions& opts) {
  if (opts.loader) return opts.loader;
  return [](const SourceRecord& r) { return read_png(r.image_path); };
}

}  // namespace

AssemblyResult assemble_cells(const SourceCatalog& catalog, const CompositionQuota& quota, const GenConfig& cfg,
                              Difficulty difficulty, ModePolicy policy, std::uint64_t seed,
                              const AssembleOptions& opts) {
  cfg.validate();
  const auto counts = quota.cells();
  const auto loader = effective_loader(opts);

  std::array<std::vector<std::size_t>, 3> pools;
  for (std::size_t i = 0; i < catalog.records().size(); ++i)
    pools[static_cast<std::size_t>(catalog.records()[i].modality)].push_back(i);

  if (opts.out_dir) std::filesystem::create_directories(*opts.out_dir / "images");

  std::array<CellOutput, 9> cells;
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < 9; ++c) {
    const Modality m = kModalities[static_cast<std::size_t>(c / 3)];
    const TaskKind k = kTaskKinds[static_cast<std::size_t>(c % 3)];
    const std::int64_t want = counts[static_cast<std::size_t>(c / 3)][static_cast<std::size_t>(c % 3)];
    CellOutput& out = cells[static_cast<std::size_t>(c)];
    if (want == 0) continue;

    std::vector<std::size_t> order = pools[static_cast<std::size_t>(m)];
    Rng rng(derive_seed(seed, std::string("cell:") + std::string(to_string(m)), k, 0));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::uint64_t attempt = 0;
    for (std::size_t idx : order) {
      if (out.filled == want) break;
      const SourceRecord& src = catalog.records()[idx];
      const std::uint64_t case_seed = derive_seed(seed, src.id, k, attempt++);
      try {
        Generated g = generate_case(src, k, cfg, case_seed, catalog, opts, loader);
        TaskInstance t;
        t.id = case_id(m, k, out.filled);
        t.kind = k;
        t.modality = m;
        t.difficulty = difficulty;
        t.mode = policy == ModePolicy::Direct      ? Mode::Direct
                 : policy == ModePolicy::Reasoning ? Mode::Reasoning
                 : (out.filled % 2 == 0 ? Mode::Direct : Mode::Reasoning);
        for (auto& [suffix, image] : g.images) {
          const std::string rel = "images/" + t.id + suffix + ".png";
          if (opts.out_dir) write_png(*opts.out_dir / rel, image);
          t.images.push_back(rel);
        }
        t.ground_truth = std::move(g.truth);
        t.prompt = render_prompt(t.ground_truth, cfg, t.mode);
        t.seed = case_seed;
        t.spec = task_spec_json(cfg, k);
        t.source_id = src.id;
        t.reference_id = g.reference_id;
        out.records.push_back(std::move(t));
        ++out.filled;
      } catch (const IoError& e) {
        // Unreadable inputs are skips; unwritable outputs abort the build.
        if (opts.out_dir && std::string_view(e.what()).find("cannot write") != std::string_view::npos) {
          out.fatal = std::current_exception();
          break;
        }
        out.skips.push_back({src.id, k, e.what()});
      } catch (const Error& e) {
        out.skips.push_back({src.id, k, e.what()});
      } catch (...) {
        out.fatal = std::current_exception();
        break;
      }
    }
  }
  for (const auto& cell : cells)
    if (cell.fatal) std::rethrow_exception(cell.fatal);

  AssemblyResult res;
  Manifest& man = res.manifest;
  man.dataset_id = opts.dataset_id;
  man.quota = quota;
  man.seed = seed;
  man.tool_version = GEOSCOUT_VERSION;
  man.difficulty = difficulty;
  man.mode_policy = policy;
  man.config = to_json(cfg);
  for (int c = 0; c < 9; ++c) {
    auto& cell = cells[static_cast<std::size_t>(c)];
    const std::int64_t want = counts[static_cast<std::size_t>(c / 3)][static_cast<std::size_t>(c % 3)];
    for (auto& r : cell.records) man.records.push_back(std::move(r));
    for (auto& s : cell.skips) res.skips.push_back(std::move(s));
    if (cell.filled < want)
      res.shortfalls.push_back({kModalities[static_cast<std::size_t>(c / 3)], kTaskKinds[static_cast<std::size_t>(c % 3)],
                                want, cell.filled});
  }
  return res;
}

Manifest assemble(const SourceCatalog& catalog, const CompositionQuota& quota, const GenConfig& cfg,
                  Difficulty difficulty, ModePolicy policy, std::uint64_t seed, const AssembleOptions& opts) {
  AssemblyResult r = assemble_cells(catalog, quota, cfg, difficulty, policy, seed, opts);
  if (!r.shortfalls.empty()) {
    std::string msg;
    for (const auto& s : r.shortfalls)
      msg += std::string(msg.empty() ? "" : "; ") + std::string(to_string(s.modality)) + "/" +
             std::string(to_string(s.kind)) + " filled " + std::to_string(s.filled) + " of " +
             std::to_string(s.wanted);
    throw InsufficientSources(msg);
  }
  return std::move(r.manifest);
}

GroundTruth regenerate_truth(const TaskInstance& rec, const SourceCatalog& catalog, const AssembleOptions& opts) {
  const SourceRecord* src = catalog.find(rec.source_id);
  if (!src) throw UnknownId("source '" + rec.source_id + "' not in catalog");
  const GenConfig cfg = apply_config_json(GenConfig::for_difficulty(rec.difficulty), rec.spec);
  AssembleOptions dry = opts;
  dry.out_dir.reset();
  return generate_case(*src, rec.kind, cfg, rec.seed, catalog, dry, effective_loader(opts)).truth;
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

Json to_json(const TaskInstance& t) {
  Json j;
  j["id"] = t.id;
  j["task"] = to_string(t.kind);
  j["modality"] = to_string(t.modality);
  j["difficulty"] = to_string(t.difficulty);
  j["mode"] = to_string(t.mode);
  j["images"] = t.images;
  j["prompt"] = t.prompt;
  j["ground_truth"] = truth_to_json(t.ground_truth);
  j["seed"] = t.seed;
  j["spec"] = t.spec;
  j["source"] = Json{{"id", t.source_id}, {"reference", t.reference_id}};
  return j;
}

TaskInstance instance_from_json(const Json& j) {
  TaskInstance t;
  t.id = j.at("id").get<std::string>();
  t.kind = parse_task_kind(j.at("task").get<std::string>());
  t.modality = parse_modality(j.at("modality").get<std::string>());
  t.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  t.mode = parse_mode(j.at("mode").get<std::string>());
  t.images = j.at("images").get<std::vector<std::string>>();
  t.prompt = j.at("prompt").get<std::string>();
  t.ground_truth = truth_from_json(t.kind, j.at("ground_truth"));
  t.seed = j.at("seed").get<std::uint64_t>();
  t.spec = j.at("spec");
  if (j.contains("source")) {
    t.source_id = j["source"].value("id", "");
    t.reference_id = j["source"].value("reference", "");
  }
  const std::size_t want_images = t.kind == TaskKind::Scale ? 1 + static_cast<std::size_t>(answer_items(t.ground_truth)) : 1;
  if (t.images.size() != want_images)
    throw InvalidArgument("expected " + std::to_string(want_images) + " image references");
  return t;
}

namespace {

Json header_json(const Manifest& m) {
  Json h;
  h["dataset_id"] = m.dataset_id;
  h["quota"] = Json{{"total", m.quota.total},
                    {"modality_weights", m.quota.modality_weights},
                    {"task_weights", m.quota.task_weights}};
  h["seed"] = m.seed;
  h["tool_version"] = m.tool_version;
  h["difficulty"] = to_string(m.difficulty);
  h["mode_policy"] = to_string(m.mode_policy);
  h["config"] = m.config;
  h["records"] = m.records.size();
  return h;
}

}  // namespace

std::string to_jsonl(const Manifest& m) {
  std::string out = header_json(m).dump() + "\n";
  for (const auto& r : m.records) out += to_json(r).dump() + "\n";
  return out;
}

void write_jsonl(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << to_jsonl(m);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Manifest parse_jsonl(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> expected;
  std::unordered_map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      if (!expected) {
        m.dataset_id = j.at("dataset_id").get<std::string>();
        const auto& q = j.at("quota");
        m.quota.total = q.at("total").get<std::int64_t>();
        m.quota.modality_weights = q.at("modality_weights").get<std::array<std::int64_t, 3>>();
        m.quota.task_weights = q.at("task_weights").get<std::array<std::int64_t, 3>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
        m.mode_policy = parse_mode_policy(j.at("mode_policy").get<std::string>());
        m.config = j.at("config");
        expected = j.at("records").get<std::size_t>();
        continue;
      }
      TaskInstance t = instance_from_json(j);
      if (!seen.emplace(t.id, lineno).second) throw SchemaError(lineno, "duplicate id '" + t.id + "'");
      m.records.push_back(std::move(t));
    } catch (const SchemaError&) {
      throw;
    } catch (const Json::exception& e) {
      throw SchemaError(lineno, e.what());
    } catch (const Error& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  if (!expected) throw SchemaError(lineno + 1, "missing manifest header line");
  if (m.records.size() != *expected)
    throw SchemaError(lineno, "header declares " + std::to_string(*expected) + " records, found " +
                                  std::to_string(m.records.size()));
  return m;
}

Manifest read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  return parse_jsonl(in);
}

}  // namespace geoscout
