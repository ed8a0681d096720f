#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "geoscout/energy.hpp"
#include "geoscout/scoring.hpp"

using namespace geoscout;

namespace {

TaskInstance make_case(const std::string& id, GroundTruth gt, Mode mode = Mode::Direct, Modality m = Modality::CT) {
  TaskInstance t;
  t.id = id;
  t.kind = kind_of(gt);
  t.modality = m;
  t.mode = mode;
  t.ground_truth = std::move(gt);
  t.images = t.kind == TaskKind::Scale ? std::vector<std::string>{"g", "p1", "p2"} : std::vector<std::string>{"x"};
  return t;
}

// Hand-scored fixture: 6 scale, 7 topo, 7 anomaly cases with their expected r_acc.
struct Fixture {
  Manifest manifest;
  std::vector<Response> responses;
  std::map<std::string, double> expected;
};

Fixture hand_fixture() {
  Fixture f;
  const ScaleTruth s{{1, 2}, {BBox(0.25, 0.25, 0.75, 0.75), BBox(0.25, 0.25, 0.5, 0.5)}};
  const TopoTruth t{Permutation({2, 0, 3, 1}), GridSpec(2, 2)};
  const AnomTruth a{5, GridSpec(4, 4)};
  auto add = [&](const std::string& id, GroundTruth gt, Mode mode, std::optional<std::string> out, double acc,
                 Modality m) {
    f.manifest.records.push_back(make_case(id, std::move(gt), mode, m));
    if (out) f.responses.push_back({id, *out});
    f.expected[id] = acc;
  };
  const auto D = Mode::Direct, R = Mode::Reasoning;
  const auto CT = Modality::CT, MR = Modality::MRI, XR = Modality::XRAY;
  add("s1", s, D, "patch 1: level=1 box=[0.25,0.25,0.75,0.75]\npatch 2: level=2 box=[0.25,0.25,0.5,0.5]", 1.0, CT);
  add("s2", s, D, "patch 1: level=1 box=[0.25,0.25,0.75,0.75]\npatch 2: level=1 box=[0.25,0.25,0.5,0.5]", 0.75, MR);
  add("s3", s, D, "patch 1: level=1 box=[0.25,0.25,0.75,0.75]", 0.5, XR);
  // IoU of the first box is 0.5
  add("s4", s, D, "patch 1: level=1 box=[0.25,0.25,0.5,0.75]\npatch 2: level=2 box=[0.25,0.25,0.5,0.5]", 0.875, CT);
  add("s5", s, D, "I cannot tell", 0.0, MR);
  add("s6", s, R,
      "<think>compare</think><answer>patch 1: level=1 box=[0.25,0.25,0.75,0.75]\npatch 2: level=2 "
      "box=[0.25,0.25,0.5,0.5]</answer>",
      1.0, XR);
  add("t1", t, D, "order=[2,0,3,1]", 1.0, CT);
  add("t2", t, D, "order=[2,0,1,3]", 0.5, MR);
  add("t3", t, D, "order=[0,1,2,3]", 0.0, XR);
  add("t4", t, D, "order=[2,2,2,2]", 0.25, CT);
  add("t5", t, D, "order=[2,0,x,1]", 0.75, MR);
  add("t6", t, D, std::nullopt, 0.0, XR);
  add("t7", t, R, "<think>hmm<answer>order=[2,0,3,1]", 1.0, CT);
  add("a1", a, D, "index=5", 1.0, CT);
  add("a2", a, D, "index=6", std::exp(-10.0), MR);
  add("a3", a, D, "index=10", std::exp(-std::sqrt(2.0) / 0.1), XR);
  add("a4", a, D, "index=0", std::exp(-std::sqrt(2.0) / 0.1), CT);
  add("a5", a, D, "index=7", std::exp(-20.0), MR);
  add("a6", a, D, "no idea", 0.0, XR);
  add("a7", a, R, "<think>.</think><answer>index=16</answer>", 0.0, CT);
  f.manifest.quota.total = static_cast<std::int64_t>(f.manifest.records.size());
  return f;
}

}  // namespace

TEST_CASE("hand-scored fixture") {
  const auto f = hand_fixture();
  REQUIRE(f.manifest.records.size() == 20);
  const auto rep = score_responses(f.manifest, f.responses, RewardConfig{});
  for (const auto& row : rep.rows) {
    INFO(row.id);
    CHECK(row.reward.r_acc == doctest::Approx(f.expected.at(row.id)).epsilon(1e-15));
  }
  const double scale = (1 + 0.75 + 0.5 + 0.875 + 0 + 1) / 6 * 100;
  const double topo = (1 + 0.5 + 0 + 0.25 + 0.75 + 0 + 1) / 7 * 100;
  const double anom = (1 + std::exp(-10.0) + 2 * std::exp(-std::sqrt(2.0) / 0.1) + std::exp(-20.0)) / 7 * 100;
  CHECK(*rep.per_task[0] == doctest::Approx(scale).epsilon(1e-14));
  CHECK(*rep.per_task[1] == doctest::Approx(topo).epsilon(1e-14));
  CHECK(*rep.per_task[2] == doctest::Approx(anom).epsilon(1e-14));
  CHECK(rep.avg == doctest::Approx((scale + topo + anom) / 3).epsilon(1e-14));
  CHECK(rep.missing == 1);
  const auto by_id = [&](const std::string& id) {
    for (const auto& r : rep.rows)
      if (r.id == id) return r.reward;
    throw std::runtime_error(id);
  };
  CHECK(by_id("s3").r_fmt == 0.25);
  CHECK(by_id("t5").r_fmt == 0.375);
  CHECK(by_id("s6").r_total == 2.0);
  CHECK(by_id("t7").r_reason == 0.0);
  CHECK(by_id("t7").r_total == 1.5);
  CHECK(report_headline(rep).rfind("scale=68.8 topo=50.0 anom=14.3", 0) == 0);
}

TEST_CASE("aggregation matches brute-force recomputation") {
  const auto f = hand_fixture();
  const auto rep = score_responses(f.manifest, f.responses, RewardConfig{});
  std::map<std::string, std::pair<double, int>> cells;
  int fails = 0;
  for (const auto& row : rep.rows) {
    auto& c = cells[std::string(to_string(row.modality)) + "/" + std::string(to_string(row.kind))];
    c.first += row.reward.r_total;
    ++c.second;
    fails += row.reward.parse_ok ? 0 : 1;
  }
  CHECK(rep.cells.size() == cells.size());
  for (const auto& [k, v] : cells) CHECK(rep.cells.at(k).r_total == doctest::Approx(v.first / v.second).epsilon(1e-14));
  CHECK(rep.parse_fail_rate == doctest::Approx(fails / 20.0));
  const auto j = report_to_json(rep);
  CHECK(j["per_task"]["topo"].get<double>() == *rep.per_task[1]);
  const auto csv = report_cases_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("ground-truth responses score 100") {
  Manifest m;
  std::vector<Response> rs;
  std::mt19937_64 gen(1);
  for (int i = 0; i < 60; ++i) {
    GroundTruth gt;
    if (i % 3 == 0)
      gt = ScaleTruth{{2}, {BBox(0.3, 0.3, 0.55, 0.55)}};
    else if (i % 3 == 1)
      gt = TopoTruth{Permutation({1, 0}), GridSpec(1, 2)};
    else
      gt = AnomTruth{static_cast<int>(gen() % 16), GridSpec(4, 4)};
    auto t = make_case("c" + std::to_string(i), gt, i % 2 ? Mode::Reasoning : Mode::Direct);
    if (t.kind == TaskKind::Scale) t.images = {"g", "p"};
    rs.push_back({t.id, render_gt_answer(gt, t.mode)});
    m.records.push_back(std::move(t));
  }
  const auto rep = score_responses(m, rs, RewardConfig{});
  for (auto& v : rep.per_task) CHECK(*v == 100.0);
  CHECK(rep.avg == 100.0);
  CHECK(rep.parse_fail_rate == 0.0);
  CHECK(report_headline(rep) == "scale=100.0 topo=100.0 anom=100.0 avg=100.0");

  // permutation invariance in response order
  auto shuffled = rs;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto rep2 = score_responses(m, shuffled, RewardConfig{});
  CHECK(report_to_json(rep2) == report_to_json(rep));

  const auto empty = score_responses(m, {}, RewardConfig{});
  for (auto& v : empty.per_task) CHECK(*v == 0.0);
  CHECK(empty.missing == 60);
}

TEST_CASE("response id errors") {
  const auto f = hand_fixture();
  auto dup = f.responses;
  dup.push_back(dup.front());
  CHECK_THROWS_AS(score_responses(f.manifest, dup, RewardConfig{}), DuplicateId);
  auto unknown = f.responses;
  unknown.push_back({"zzz", "index=1"});
  CHECK_THROWS_AS(score_responses(f.manifest, unknown, RewardConfig{}), UnknownId);
  CHECK_THROWS_AS(score_responses(f.manifest, f.responses, RewardConfig{}, MissingPolicy::Error), MissingResponse);
}

TEST_CASE("answer extractor hook") {
  const auto f = hand_fixture();
  const auto rep = score_responses(f.manifest, f.responses, RewardConfig{}, MissingPolicy::Zero,
                                   [](std::string_view, const TaskInstance& t) { return render_gt_answer(t.ground_truth, t.mode); });
  CHECK(*rep.per_task[0] == 100.0);
  CHECK(*rep.per_task[1] == doctest::Approx(600.0 / 7.0));  // t6 has no response
  CHECK(*rep.per_task[2] == 100.0);
}

TEST_CASE("responses jsonl") {
  std::istringstream in("{\"id\":\"a\",\"output\":\"x\"}\n\n{\"id\":\"b\",\"output\":\"index=1\"}\n{\"id\":3}\n");
  try {
    parse_responses(in);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("energy gap examples") {
  auto constant = [](double f, double cf, int n) {
    std::vector<EnergyRecord> v;
    for (int i = 0; i < n; ++i) v.push_back({"p" + std::to_string(i), f, cf});
    return v;
  };
  auto g = energy_gap(constant(1.0, 1.69, 50));
  CHECK(g.gap == 0.69);
  CHECK(g.separation_rate == 1.0);
  CHECK(energy_gap(constant(0.25, 0.31, 50)).gap == 0.06);
  CHECK(std::abs(energy_gap(constant(1.0, 1.06, 50)).gap - 0.06) <= 1e-12);
  g = energy_gap(constant(2.5, 2.5, 10));
  CHECK(g.gap == 0.0);
  CHECK(g.separation_rate == 0.0);
  CHECK_THROWS_AS(energy_gap(constant(1, 2, 1)), EmptyInput);
  CHECK_THROWS_AS(energy_gap(constant(-1, 2, 3)), InvalidArgument);
}

TEST_CASE("energy gap: order invariance and translation equivariance") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EnergyRecord> v;
    for (int i = 0; i < 200; ++i) v.push_back({"p" + std::to_string(i), u(gen), u(gen)});
    const auto base = energy_gap(v);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto s = energy_gap(shuffled);
    CHECK(s.gap == base.gap);
    CHECK(histogram_csv(s) == histogram_csv(base));
    for (double c : {0.01, 0.5, 2.0}) {
      auto shifted = v;
      for (auto& r : shifted) r.nll_counterfactual += c;
      CHECK(std::abs(energy_gap(shifted).gap - (base.gap + c)) <= 1e-12);
    }
    std::int64_t total = 0;
    for (const auto& b : base.histogram) total += b.factual + b.counterfactual;
    CHECK(total == 400);
  }
}

TEST_CASE("energy csv parsing") {
  std::istringstream ok("pair_id,nll_factual,nll_counterfactual\na,1.0,1.5\r\nb, 0.5 ,2\n");
  const auto v = parse_energy_csv(ok);
  REQUIRE(v.size() == 2);
  CHECK(v[1].nll_factual == 0.5);
  std::istringstream bad_header("id,f,cf\na,1,2\n");
  CHECK_THROWS_AS(parse_energy_csv(bad_header), SchemaError);
  std::istringstream bad_row("pair_id,nll_factual,nll_counterfactual\na,1,2\nb,1\n");
  try {
    parse_energy_csv(bad_row);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream bad_num("pair_id,nll_factual,nll_counterfactual\na,1,zz\n");
  CHECK_THROWS_AS(parse_energy_csv(bad_num), SchemaError);
}
