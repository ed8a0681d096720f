#include "geoscout/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>
#include <limits>
#include <numeric>

namespace geoscout {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - mx));
  for (double& v : p) v /= z;
  return p;
}

PolicyTable::PolicyTable(std::vector<double> logits) : logits_(std::move(logits)) {
  if (logits_.empty()) throw InvalidArgument("policy needs at least one action");
  for (double v : logits_)
    if (!std::isfinite(v)) throw InvalidArgument("policy logits must be finite");
}

PolicyTable PolicyTable::uniform(std::size_t actions) { return PolicyTable(std::vector<double>(actions, 0.0)); }

std::size_t PolicyTable::sample(Rng& rng) const {
  const auto p = probs();
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

void GrpoConfig::validate() const {
  if (group_size < 2) throw InvalidArgument("group size must be >= 2");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (!(clip > 0.0 && clip < 1.0)) throw InvalidArgument("clip ratio must be in (0,1)");
  if (!(advantage_eps > 0.0)) throw InvalidArgument("advantage eps must be > 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be > 0");
  if (steps < 0) throw InvalidArgument("steps must be >= 0");
}

std::string_view to_string(RewardMode m) { return m == RewardMode::Dense ? "dense" : "sparse"; }

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

SimEnv::SimEnv(std::string name, std::vector<double> rewards, RewardMode mode)
    : name_(std::move(name)), rewards_(std::move(rewards)), mode_(mode) {
  if (rewards_.empty()) throw InvalidArgument("environment needs at least one action");
}

double SimEnv::max_reward() const { return *std::max_element(rewards_.begin(), rewards_.end()); }

double SimEnv::expected_reward(std::span<const double> probs) const {
  double e = 0.0;
  for (std::size_t i = 0; i < rewards_.size(); ++i) e += probs[i] * rewards_[i];
  return e;
}

SimEnv SimEnv::jigsaw(const GridSpec& grid, const Permutation& truth, RewardMode mode, const RewardConfig& cfg) {
  if (truth.size() != grid.cells()) throw InvalidArgument("ground truth does not match grid");
  const GroundTruth gt = TopoTruth{truth, grid};
  std::vector<int> perm(static_cast<std::size_t>(grid.cells()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> rewards;
  do {
    if (mode == RewardMode::Sparse)
      rewards.push_back(perm == truth.mapping() ? 1.0 : 0.0);
    else
      rewards.push_back(total_reward(format_order_answer(perm), gt, Mode::Direct, cfg).r_acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return SimEnv("jigsaw" + grid.str(), std::move(rewards), mode);
}

SimEnv SimEnv::anomaly(const GridSpec& grid, int k_star, RewardMode mode, const RewardConfig& cfg) {
  if (k_star < 0 || k_star >= grid.cells()) throw InvalidArgument("k* outside grid");
  const GroundTruth gt = AnomTruth{k_star, grid};
  std::vector<double> rewards;
  for (int k = 0; k < grid.cells(); ++k) {
    if (mode == RewardMode::Sparse)
      rewards.push_back(k == k_star ? 1.0 : 0.0);
    else
      rewards.push_back(total_reward(format_index_answer(k), gt, Mode::Direct, cfg).r_acc);
  }
  return SimEnv("anomaly" + grid.str(), std::move(rewards), mode);
}

std::vector<std::string> sim_env_names() {
  return {"jigsaw1x2", "jigsaw1x4", "jigsaw2x2", "anomaly2x2", "anomaly4x2", "anomaly4x4"};
}

SimEnv SimEnv::named(std::string_view name, RewardMode mode, const RewardConfig& cfg) {
  if (name == "jigsaw1x2") return jigsaw(GridSpec(1, 2), Permutation({1, 0}), mode, cfg);
  if (name == "jigsaw1x4") return jigsaw(GridSpec(1, 4), Permutation({2, 0, 3, 1}), mode, cfg);
  if (name == "jigsaw2x2") return jigsaw(GridSpec(2, 2), Permutation({2, 0, 3, 1}), mode, cfg);
  if (name == "anomaly2x2") return anomaly(GridSpec(2, 2), 3, mode, cfg);
  if (name == "anomaly4x2") return anomaly(GridSpec(4, 2), 5, mode, cfg);
  if (name == "anomaly4x4") return anomaly(GridSpec(4, 4), 10, mode, cfg);
  throw InvalidArgument("unknown environment '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

std::vector<double> group_advantages(std::span<const double> rewards, double eps) {
  // a group with no spread carries no signal; skip the rounding residue of the mean
  if (std::adjacent_find(rewards.begin(), rewards.end(), std::not_equal_to<>()) == rewards.end())
    return std::vector<double>(rewards.size(), 0.0);
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::max(std::sqrt(var / n), eps);
  std::vector<double> a;
  a.reserve(rewards.size());
  for (double r : rewards) a.push_back((r - mean) / sd);
  return a;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  return kl;
}

double grpo_surrogate(std::span<const double> logits, const Group& g, std::span<const double> ref_probs,
                      double beta, double clip) {
  const auto p = softmax(logits);
  double s = 0.0;
  for (std::size_t i = 0; i < g.actions.size(); ++i) {
    const std::size_t a = g.actions[i];
    const double rho = p[a] / g.old_probs[a];
    const double A = g.advantages[i];
    s += std::min(rho * A, std::clamp(rho, 1.0 - clip, 1.0 + clip) * A);
  }
  return s / static_cast<double>(g.actions.size()) - beta * kl_divergence(p, ref_probs);
}

std::vector<double> grpo_surrogate_gradient(std::span<const double> logits, const Group& g,
                                            std::span<const double> ref_probs, double beta, double clip) {
  const auto p = softmax(logits);
  const std::size_t n = p.size();
  std::vector<double> grad(n, 0.0);
  const double inv_g = 1.0 / static_cast<double>(g.actions.size());
  for (std::size_t i = 0; i < g.actions.size(); ++i) {
    const std::size_t a = g.actions[i];
    const double rho = p[a] / g.old_probs[a];
    const double A = g.advantages[i];
    // The clipped branch is flat in rho; it is selected when it is strictly
    // smaller than the unclipped one.
    const bool flat = (A > 0.0 && rho > 1.0 + clip) || (A < 0.0 && rho < 1.0 - clip);
    if (flat || A == 0.0) continue;
    // d rho / d logits = rho (e_a - p)
    const double c = inv_g * A * rho;
    for (std::size_t k = 0; k < n; ++k) grad[k] -= c * p[k];
    grad[a] += c;
  }
  if (beta != 0.0) {
    const double kl = kl_divergence(p, ref_probs);
    for (std::size_t k = 0; k < n; ++k) {
      if (p[k] <= 0.0) continue;
      grad[k] -= beta * p[k] * (std::log(p[k]) - std::log(ref_probs[k]) - kl);
    }
  }
  return grad;
}

StepResult grpo_step(const PolicyTable& policy, const PolicyTable& ref, const SimEnv& env, const GrpoConfig& cfg,
                     Rng& rng) {
  if (policy.size() != ref.size() || policy.size() != env.actions())
    throw InvalidArgument("policy, reference and environment disagree on the action space");
  Group g;
  g.old_probs = policy.probs();
  std::vector<double> rewards;
  for (int i = 0; i < cfg.group_size; ++i) {
    const std::size_t a = policy.sample(rng);
    g.actions.push_back(a);
    rewards.push_back(env.reward(a));
  }
  g.advantages = group_advantages(rewards, cfg.advantage_eps);
  const auto ref_probs = ref.probs();
  const auto grad = grpo_surrogate_gradient(policy.logits(), g, ref_probs, cfg.beta, cfg.clip);
  std::vector<double> next = policy.logits();
  for (std::size_t k = 0; k < next.size(); ++k) next[k] += cfg.learning_rate * grad[k];

  StepResult out{PolicyTable(std::move(next)), {}};
  const auto p = out.policy.probs();
  out.stats.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  out.stats.kl = kl_divergence(p, ref_probs);
  out.stats.expected_reward = env.expected_reward(p);
  return out;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

int steps_to_threshold(const std::vector<double>& expected, double max_reward, double threshold) {
  for (std::size_t t = 0; t < expected.size(); ++t)
    if (expected[t] >= threshold * max_reward) return static_cast<int>(t);
  return static_cast<int>(expected.size());
}

namespace {

double median(std::vector<int> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Run {
  std::vector<CurvePoint> points;
  int hit;
};

Run run_one(const SimEnv& env, const GrpoConfig& cfg, std::uint64_t seed, double threshold) {
  Rng rng(seed);
  const PolicyTable ref = PolicyTable::uniform(env.actions());
  PolicyTable policy = ref;
  std::vector<double> expected;
  Run run;
  auto record = [&](int step, const PolicyTable& pol) {
    const auto p = pol.probs();
    const double e = env.expected_reward(p);
    expected.push_back(e);
    run.points.push_back({seed, step, env.mode(), e, kl_divergence(p, ref.probs())});
  };
  record(0, policy);
  for (int t = 1; t <= cfg.steps; ++t) {
    policy = grpo_step(policy, ref, env, cfg, rng).policy;
    record(t, policy);
  }
  run.hit = steps_to_threshold(expected, env.max_reward(), threshold);
  return run;
}

}  // namespace

Experiment run_experiment(const std::vector<SimEnv>& envs, const GrpoConfig& cfg,
                          const std::vector<std::uint64_t>& seeds, double threshold) {
  cfg.validate();
  Experiment ex;
  ex.threshold = threshold;
  ex.steps = cfg.steps;
  const std::size_t jobs = envs.size() * seeds.size();
  std::vector<Run> runs(jobs);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs); ++j) {
    const auto e = static_cast<std::size_t>(j) / seeds.size();
    const auto s = static_cast<std::size_t>(j) % seeds.size();
    runs[static_cast<std::size_t>(j)] = run_one(envs[e], cfg, seeds[s], threshold);
  }
  for (std::size_t e = 0; e < envs.size(); ++e) {
    ModeSummary sum{envs[e].mode(), {}, 0.0, 0};
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      Run& r = runs[e * seeds.size() + s];
      sum.steps_to_threshold.push_back(r.hit);
      if (r.hit <= cfg.steps) ++sum.converged;
      ex.curves.insert(ex.curves.end(), r.points.begin(), r.points.end());
    }
    sum.median_steps = median(sum.steps_to_threshold);
    ex.summaries.push_back(std::move(sum));
  }
  return ex;
}

std::string curves_csv(const Experiment& e) {
  std::string out = "seed,step,mode,mean_reward,kl\n";
  char buf[128];
  for (const auto& p : e.curves) {
    std::snprintf(buf, sizeof buf, "%llu,%d,%s,%.17g,%.17g\n", static_cast<unsigned long long>(p.seed), p.step,
                  p.mode == RewardMode::Dense ? "dense" : "sparse", p.mean_reward, p.kl);
    out += buf;
  }
  return out;
}

Json experiment_summary_json(const Experiment& e, std::string_view env_name) {
  Json j;
  j["env"] = env_name;
  j["steps"] = e.steps;
  j["threshold"] = e.threshold;
  Json modes = Json::object();
  for (const auto& s : e.summaries) {
    modes[std::string(to_string(s.mode))] = Json{{"median_steps_to_threshold", s.median_steps},
                                                 {"converged", s.converged},
                                                 {"seeds", s.steps_to_threshold.size()},
                                                 {"steps_to_threshold", s.steps_to_threshold}};
  }
  j["modes"] = modes;
  return j;
}

}  // namespace geoscout
