#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geoscout/core.hpp"
#include "geoscout/dataset.hpp"
#include "geoscout/rewards.hpp"
#include "geoscout/rng.hpp"

namespace geoscout {

std::vector<double> softmax(std::span<const double> logits);

// Tabular softmax policy over a finite action space.
class PolicyTable {
 public:
  explicit PolicyTable(std::vector<double> logits);
  static PolicyTable uniform(std::size_t actions);

  std::size_t size() const { return logits_.size(); }
  const std::vector<double>& logits() const { return logits_; }
  std::vector<double> probs() const { return softmax(logits_); }
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> logits_;
};

struct GrpoConfig {
  int group_size = 8;
  double beta = 0.04;  // KL penalty
  double clip = 0.2;   // PPO clip range epsilon
  double learning_rate = 1.0;
  int steps = 300;
  double advantage_eps = 1e-8;  // floor on the group reward std

  void validate() const;
};

enum class RewardMode { Dense, Sparse };
std::string_view to_string(RewardMode m);

// Single-prompt bandit: a fixed ground truth and one reward per action.
class SimEnv {
 public:
  // Custom table; the action with the highest reward is the optimum.
  SimEnv(std::string name, std::vector<double> rewards, RewardMode mode);

  static SimEnv jigsaw(const GridSpec& grid, const Permutation& truth, RewardMode mode,
                       const RewardConfig& cfg = {});
  static SimEnv anomaly(const GridSpec& grid, int k_star, RewardMode mode, const RewardConfig& cfg = {});
  // Named environments: jigsaw1x2, jigsaw1x4, jigsaw2x2, anomaly2x2, anomaly4x2, anomaly4x4.
  static SimEnv named(std::string_view name, RewardMode mode, const RewardConfig& cfg = {});

  const std::string& name() const { return name_; }
  RewardMode mode() const { return mode_; }
  std::size_t actions() const { return rewards_.size(); }
  double reward(std::size_t a) const { return rewards_.at(a); }
  const std::vector<double>& rewards() const { return rewards_; }
  double max_reward() const;
  double expected_reward(std::span<const double> probs) const;

 private:
  std::string name_;
  std::vector<double> rewards_;
  RewardMode mode_;
};

std::vector<std::string> sim_env_names();

// A_i = (r_i - mean) / max(population std, eps)
std::vector<double> group_advantages(std::span<const double> rewards, double eps);

double kl_divergence(std::span<const double> p, std::span<const double> q);

// One sampled group, frozen at the start of a step.
struct Group {
  std::vector<std::size_t> actions;
  std::vector<double> advantages;
  std::vector<double> old_probs;  // pi_old over the full action space
};

// (1/G) sum_i min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) - beta KL(pi || ref)
double grpo_surrogate(std::span<const double> logits, const Group& g, std::span<const double> ref_probs,
                      double beta, double clip);
std::vector<double> grpo_surrogate_gradient(std::span<const double> logits, const Group& g,
                                            std::span<const double> ref_probs, double beta, double clip);

struct StepStats {
  double mean_reward = 0.0;      // sampled group mean
  double kl = 0.0;               // KL(pi_new || ref)
  double expected_reward = 0.0;  // exact, under pi_new
};

struct StepResult {
  PolicyTable policy;
  StepStats stats;
};

StepResult grpo_step(const PolicyTable& policy, const PolicyTable& ref, const SimEnv& env, const GrpoConfig& cfg,
                     Rng& rng);

struct CurvePoint {
  std::uint64_t seed;
  int step;
  RewardMode mode;
  double mean_reward;  // exact expected reward of the policy after `step` updates
  double kl;
};

struct ModeSummary {
  RewardMode mode;
  std::vector<int> steps_to_threshold;  // steps+1 marks "never reached"
  double median_steps = 0.0;
  int converged = 0;
};

struct Experiment {
  std::vector<CurvePoint> curves;
  std::vector<ModeSummary> summaries;
  double threshold = 0.99;
  int steps = 0;
};

// First step whose expected reward reaches threshold * max, or steps+1.
int steps_to_threshold(const std::vector<double>& expected, double max_reward, double threshold);

// Runs every env over every seed (seeds in parallel; each run is serial).
// Both modes of a seed consume the same random stream.
Experiment run_experiment(const std::vector<SimEnv>& envs, const GrpoConfig& cfg,
                          const std::vector<std::uint64_t>& seeds, double threshold = 0.99);

std::string curves_csv(const Experiment& e);
Json experiment_summary_json(const Experiment& e, std::string_view env_name);

}  // namespace geoscout
