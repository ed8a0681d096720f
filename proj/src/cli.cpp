#include "geoscout/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "geoscout/dataset.hpp"
#include "geoscout/energy.hpp"
#include "geoscout/grpo.hpp"
#include "geoscout/scoring.hpp"
#include "geoscout/service.hpp"

namespace geoscout {
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string config;
  int jobs = 0;
};

struct GenOpts {
  std::string catalog, embeddings, out;
  std::int64_t total = 10800;
  std::string difficulty = "hard", mode = "direct", dataset_id = "geoscout";
  std::optional<int> slice_offset;
  std::optional<double> noise_sigma;
};

struct ScoreOpts {
  std::string manifest, responses, report;
  bool strict = false;
  double tau = 0.1, scale_mix = 0.5;
};

struct ServeOpts {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_batch = 1024;
  double tau = 0.1, scale_mix = 0.5;
};

struct SimOpts {
  std::string env, reward = "both", out;
  int seeds = 20;
  GrpoConfig grpo;
  double threshold = 0.99;
};

struct EnergyOpts {
  std::string pairs, out;
  double bin_width = 0.05;
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f || !(f << s)) throw IoError("cannot write '" + p.string() + "'");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
}

void apply_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

int cmd_gen(const GlobalOpts& g, const GenOpts& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(o.catalog)) throw InvalidArgument("catalog not found: '" + o.catalog + "'");
  const Difficulty diff = parse_difficulty(o.difficulty);
  const ModePolicy policy = parse_mode_policy(o.mode);
  if (o.total < 0) throw InvalidArgument("--total must be >= 0");

  // defaults < config file < flags
  GenConfig cfg = GenConfig::for_difficulty(diff);
  if (!g.config.empty()) {
    std::ifstream f(g.config);
    if (!f) throw InvalidArgument("cannot read config '" + g.config + "'");
    const auto j = Json::parse(f, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("config '" + g.config + "' is not a JSON object");
    cfg = apply_config_json(cfg, j);
  }
  if (o.slice_offset) cfg.anomaly.slice_offset = *o.slice_offset;
  if (o.noise_sigma) cfg.anomaly.noise_sigma = *o.noise_sigma;
  cfg.validate();

  const SourceCatalog catalog = load_catalog(o.catalog);
  std::optional<EmbeddingIndex> index;
  if (!o.embeddings.empty()) index = load_embeddings(o.embeddings);

  CompositionQuota quota;
  quota.total = o.total;
  AssembleOptions opts;
  opts.out_dir = fs::path(o.out);
  opts.index = index ? &*index : nullptr;
  opts.dataset_id = o.dataset_id;
  ensure_dir(o.out);

  const AssemblyResult res = assemble_cells(catalog, quota, cfg, diff, policy, g.seed, opts);
  if (!res.skips.empty()) {
    err << "skipped " << res.skips.size() << " generation attempt(s):\n";
    for (const auto& s : res.skips) err << "  " << s.source_id << " " << to_string(s.kind) << ": " << s.reason << "\n";
  }
  if (!res.shortfalls.empty()) {
    for (const auto& s : res.shortfalls)
      err << "underfilled " << to_string(s.modality) << "/" << to_string(s.kind) << ": " << s.filled << " of "
          << s.wanted << "\n";
    throw InsufficientSources(std::to_string(res.shortfalls.size()) + " cell(s) underfilled");
  }
  const fs::path manifest = fs::path(o.out) / "manifest.jsonl";
  write_jsonl(res.manifest, manifest);
  std::int64_t by_task[3] = {0, 0, 0};
  for (const auto& r : res.manifest.records) ++by_task[static_cast<int>(r.kind)];
  out << "wrote " << res.manifest.records.size() << " cases to " << manifest.string() << " (scale=" << by_task[0]
      << " topo=" << by_task[1] << " anom=" << by_task[2] << ")\n";
  return kExitOk;
}

int cmd_score(const ScoreOpts& o, std::ostream& out) {
  RewardConfig rc;
  rc.tau = o.tau;
  rc.scale_mix = o.scale_mix;
  rc.validate();
  const Manifest m = read_jsonl(o.manifest);
  const auto responses = read_responses(o.responses);
  const ScoreReport rep = score_responses(m, responses, rc, o.strict ? MissingPolicy::Error : MissingPolicy::Zero);
  if (!o.report.empty()) {
    ensure_dir(o.report);
    write_text(fs::path(o.report) / "report.json", report_to_json(rep).dump(2) + "\n");
    write_text(fs::path(o.report) / "cases.csv", report_cases_csv(rep));
  }
  out << report_headline(rep) << "\n";
  return kExitOk;
}

int cmd_serve(const ServeOpts& o, std::ostream& out) {
  ServiceConfig cfg;
  cfg.host = o.host;
  cfg.port = o.port;
  cfg.max_batch = o.max_batch;
  cfg.reward.tau = o.tau;
  cfg.reward.scale_mix = o.scale_mix;
  cfg.reward.validate();
  RewardServer server(cfg);
  const int port = server.bind();
  out << "listening on " << o.host << ":" << port << std::endl;
  server.listen();
  return kExitOk;
}

int cmd_simulate(const GlobalOpts& g, const SimOpts& o, std::ostream& out) {
  if (o.seeds < 1) throw InvalidArgument("--seeds must be >= 1");
  std::vector<SimEnv> envs;
  if (o.reward == "dense" || o.reward == "both") envs.push_back(SimEnv::named(o.env, RewardMode::Dense));
  if (o.reward == "sparse" || o.reward == "both") envs.push_back(SimEnv::named(o.env, RewardMode::Sparse));
  if (envs.empty()) throw InvalidArgument("--reward must be dense, sparse or both");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < o.seeds; ++i) seeds.push_back(g.seed + static_cast<std::uint64_t>(i));
  const Experiment ex = run_experiment(envs, o.grpo, seeds, o.threshold);
  const Json summary = experiment_summary_json(ex, o.env);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(fs::path(o.out) / "curves.csv", curves_csv(ex));
    write_text(fs::path(o.out) / "summary.json", summary.dump(2) + "\n");
  }
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_energy(const EnergyOpts& o, std::ostream& out) {
  const auto records = read_energy_csv(o.pairs);
  const GapStats s = energy_gap(records, o.bin_width);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(fs::path(o.out) / "gap.json", gap_to_json(s).dump(2) + "\n");
    write_text(fs::path(o.out) / "histogram.csv", histogram_csv(s));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "pairs=%zu gap=%.6f separation_rate=%.4f\n", s.pairs, s.gap, s.separation_rate);
  out << buf;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric proxy-task forge, reward engine and GRPO simulator", "geoscout"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(engine_version()));

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--config", g.config, "Generator config JSON, layered over defaults");
  app.add_option("--jobs", g.jobs, "Worker threads for gen and score (0 = all cores)")->capture_default_str();

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a benchmark manifest and images");
  gen_cmd->add_option("--catalog", gen.catalog, "Source catalog JSONL")->required();
  gen_cmd->add_option("--embeddings", gen.embeddings, "Embedding index JSONL for X-ray reference retrieval");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--total", gen.total, "Number of cases")->capture_default_str();
  gen_cmd->add_option("--difficulty", gen.difficulty, "easy, medium or hard")
      ->check(CLI::IsMember({"easy", "medium", "hard"}))
      ->capture_default_str();
  gen_cmd->add_option("--mode", gen.mode, "direct, reasoning or split")
      ->check(CLI::IsMember({"direct", "reasoning", "split"}))
      ->capture_default_str();
  gen_cmd->add_option("--dataset-id", gen.dataset_id, "Dataset id stored in the manifest")->capture_default_str();
  gen_cmd->add_option("--slice-offset", gen.slice_offset, "CT/MRI reference slice offset (1-5)");
  gen_cmd->add_option("--noise-sigma", gen.noise_sigma, "Seam noise std on normalized intensities");

  ScoreOpts score;
  auto* score_cmd = app.add_subcommand("score", "Score model responses against a manifest");
  score_cmd->add_option("--manifest", score.manifest, "Manifest JSONL")->required();
  score_cmd->add_option("--responses", score.responses, "Responses JSONL ({\"id\",\"output\"})")->required();
  score_cmd->add_option("--report", score.report, "Directory for report.json and cases.csv");
  score_cmd->add_flag("--strict", score.strict, "Missing responses are an error instead of scoring 0");
  score_cmd->add_option("--tau", score.tau, "Anomaly distance temperature")->capture_default_str();
  score_cmd->add_option("--scale-mix", score.scale_mix, "Weight of level accuracy in the scale reward")
      ->capture_default_str();

  ServeOpts serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the batch reward HTTP service");
  serve_cmd->add_option("--host", serve.host, "Bind address")->envname("GEOSCOUT_HOST")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port (0 = ephemeral)")->envname("GEOSCOUT_PORT")->capture_default_str();
  serve_cmd->add_option("--max-batch", serve.max_batch, "Largest accepted batch")
      ->envname("GEOSCOUT_MAX_BATCH")
      ->capture_default_str();
  serve_cmd->add_option("--tau", serve.tau, "Anomaly distance temperature")
      ->envname("GEOSCOUT_TAU")
      ->capture_default_str();
  serve_cmd->add_option("--scale-mix", serve.scale_mix, "Weight of level accuracy in the scale reward")
      ->envname("GEOSCOUT_SCALE_MIX")
      ->capture_default_str();

  SimOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the tabular GRPO dense-vs-sparse experiment");
  sim_cmd->add_option("--env", sim.env, "jigsaw1x2, jigsaw1x4, jigsaw2x2, anomaly2x2, anomaly4x2 or anomaly4x4")
      ->required();
  sim_cmd->add_option("--reward", sim.reward, "dense, sparse or both")
      ->check(CLI::IsMember({"dense", "sparse", "both"}))
      ->capture_default_str();
  sim_cmd->add_option("--seeds", sim.seeds, "Number of seeds, starting at --seed")->capture_default_str();
  sim_cmd->add_option("--steps", sim.grpo.steps, "Updates per run")->capture_default_str();
  sim_cmd->add_option("--group-size", sim.grpo.group_size, "Samples per group (G)")->capture_default_str();
  sim_cmd->add_option("--beta", sim.grpo.beta, "KL penalty weight")->capture_default_str();
  sim_cmd->add_option("--clip", sim.grpo.clip, "Clip range epsilon")->capture_default_str();
  sim_cmd->add_option("--lr", sim.grpo.learning_rate, "Learning rate on the logits")->capture_default_str();
  sim_cmd->add_option("--threshold", sim.threshold, "Fraction of the optimum that counts as converged")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Directory for curves.csv and summary.json");

  EnergyOpts energy;
  auto* energy_cmd = app.add_subcommand("energy", "Factual vs counterfactual NLL gap statistics");
  energy_cmd->add_option("--pairs", energy.pairs, "CSV pair_id,nll_factual,nll_counterfactual")->required();
  energy_cmd->add_option("--out", energy.out, "Directory for gap.json and histogram.csv");
  energy_cmd->add_option("--bin-width", energy.bin_width, "Histogram bin width")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << engine_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    apply_jobs(g.jobs);
    if (gen_cmd->parsed()) return cmd_gen(g, gen, out, err);
    if (score_cmd->parsed()) return cmd_score(score, out);
    if (serve_cmd->parsed()) return cmd_serve(serve, out);
    if (sim_cmd->parsed()) return cmd_simulate(g, sim, out);
    if (energy_cmd->parsed()) return cmd_energy(energy, out);
  } catch (const InsufficientSources& e) {
    err << "error: " << e.what() << "\n";
    return kExitSources;
  } catch (const UnknownId& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const DuplicateId& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const MissingResponse& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitFailure;
}

}  // namespace geoscout
