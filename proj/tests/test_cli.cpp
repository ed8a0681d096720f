#include <fstream>
#include <sstream>

#include "doctest.h"
#include "geoscout/cli.hpp"
#include "geoscout/dataset.hpp"
#include "geoscout/service.hpp"
#include "support.hpp"

using namespace geoscout;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "geoscout");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const fs::path kGolden = fs::path(GEOSCOUT_TEST_DATA) / "golden";

}  // namespace

TEST_CASE("help text matches the snapshots") {
  // set GEOSCOUT_UPDATE_GOLDEN=1 to rewrite them
  const bool update = std::getenv("GEOSCOUT_UPDATE_GOLDEN") != nullptr;
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"help.txt", {"--help"}},
      {"help_gen.txt", {"gen", "--help"}},
      {"help_score.txt", {"score", "--help"}},
      {"help_serve.txt", {"serve", "--help"}},
      {"help_simulate.txt", {"simulate", "--help"}},
      {"help_energy.txt", {"energy", "--help"}}};
  for (const auto& [file, args] : cases) {
    CAPTURE(file);
    const auto r = run(args);
    CHECK(r.code == kExitOk);
    if (update) std::ofstream(kGolden / file, std::ios::binary) << r.out;
    CHECK(r.out == slurp(kGolden / file));
  }
}

TEST_CASE("version and usage errors") {
  auto r = run({"--version"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == std::string(engine_version()) + "\n");
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"simulate"}).code == kExitConfig);
  CHECK(run({"simulate", "--env", "rotation2x2"}).code == kExitConfig);
  CHECK(run({"simulate", "--env", "jigsaw1x2", "--clip", "1.5"}).code == kExitConfig);
  CHECK(run({"gen", "--catalog", "/nonexistent/catalog.jsonl", "--out", "/tmp/x"}).code == kExitConfig);
  r = run({"gen", "--catalog", "/nonexistent/catalog.jsonl", "--out", "/tmp/x"});
  CHECK(r.err.find("/nonexistent/catalog.jsonl") != std::string::npos);
  CHECK(run({"score", "--manifest", "/nonexistent/m.jsonl", "--responses", "/nonexistent/r.jsonl"}).code == kExitConfig);
}

TEST_CASE("gen then score") {
  testsupport::TempDir dir("cli");
  const auto fx = testsupport::write_fixture_catalog(dir.path(), 20);
  const std::vector<std::string> common{"--seed", "7", "gen", "--catalog", fx.catalog.string(), "--embeddings",
                                        fx.embeddings.string(), "--total", "108"};
  auto a_args = common, b_args = common;
  a_args.insert(a_args.end(), {"--out", (dir / "a").string()});
  b_args.insert(b_args.end(), {"--out", (dir / "b").string()});
  const auto a = run(a_args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out.find("wrote 108 cases") == 0);
  CHECK(a.out.find("(scale=18 topo=54 anom=36)") != std::string::npos);
  REQUIRE(run(b_args).code == kExitOk);
  CHECK(slurp(dir / "a" / "manifest.jsonl") == slurp(dir / "b" / "manifest.jsonl"));

  const Manifest m = read_jsonl(dir / "a" / "manifest.jsonl");
  {
    std::ofstream f(dir / "responses.jsonl");
    for (const auto& rec : m.records)
      f << Json{{"id", rec.id}, {"output", render_gt_answer(rec.ground_truth, rec.mode)}}.dump() << "\n";
  }
  const auto s = run({"score", "--manifest", (dir / "a" / "manifest.jsonl").string(), "--responses",
                      (dir / "responses.jsonl").string(), "--report", (dir / "report").string()});
  REQUIRE(s.code == kExitOk);
  CHECK(s.out == "scale=100.0 topo=100.0 anom=100.0 avg=100.0\n");
  CHECK(fs::exists(dir / "report" / "report.json"));
  CHECK(fs::exists(dir / "report" / "cases.csv"));

  {
    std::ofstream f(dir / "responses.jsonl", std::ios::app);
    f << Json{{"id", m.records.front().id}, {"output", "x"}}.dump() << "\n";
  }
  CHECK(run({"score", "--manifest", (dir / "a" / "manifest.jsonl").string(), "--responses",
             (dir / "responses.jsonl").string()})
            .code == kExitMismatch);

  // too few sources for the requested size
  auto short_args = common;
  short_args[short_args.size() - 1] = "10800";
  short_args.insert(short_args.end(), {"--out", (dir / "c").string()});
  const auto c = run(short_args);
  CHECK(c.code == kExitSources);
  CHECK(c.err.find("underfilled") != std::string::npos);
}

TEST_CASE("simulate writes curves and both medians") {
  testsupport::TempDir dir("sim");
  const auto r = run({"--seed", "3", "simulate", "--env", "jigsaw1x2", "--seeds", "3", "--steps", "40", "--out",
                      dir.path().string()});
  REQUIRE(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j.at("env") == "jigsaw1x2");
  CHECK(j.at("modes").contains("dense"));
  CHECK(j.at("modes").contains("sparse"));
  CHECK(j.at("modes").at("dense").at("seeds") == 3);
  CHECK(Json::parse(slurp(dir / "summary.json")) == j);
  const auto csv = slurp(dir / "curves.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3 * 41);

  const auto d = run({"simulate", "--env", "anomaly2x2", "--reward", "dense", "--seeds", "2", "--steps", "0"});
  REQUIRE(d.code == kExitOk);
  CHECK_FALSE(Json::parse(d.out).at("modes").contains("sparse"));
}

TEST_CASE("energy") {
  testsupport::TempDir dir("energy");
  {
    std::ofstream f(dir / "pairs.csv");
    f << "pair_id,nll_factual,nll_counterfactual\n";
    for (int i = 0; i < 50; ++i) f << "p" << i << ",1.0,1.69\n";
  }
  const auto r = run({"energy", "--pairs", (dir / "pairs.csv").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out == "pairs=50 gap=0.690000 separation_rate=1.0000\n");
  CHECK(fs::exists(dir / "out" / "gap.json"));
  CHECK(fs::exists(dir / "out" / "histogram.csv"));
  CHECK(run({"energy", "--pairs", (dir / "missing.csv").string()}).code == kExitConfig);
}
