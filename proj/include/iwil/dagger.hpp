#pragma once

// Training loops: DAgger over the training tasks, importance-weighted
// adaptation to a held-out task, and the two reference baselines.

#include <cstdint>
#include <span>
#include <vector>

#include "iwil/envs.hpp"
#include "iwil/kernels.hpp"
#include "iwil/policy.hpp"
#include "iwil/reweight.hpp"

namespace iwil {

using Dataset = std::vector<Sample>;

struct TrainConfig {
  double alpha = 0.01;  // base training step
  double beta = 0.01;   // adaptation step on the policy
  double gamma = 0.05;  // step on the importance logits
  int K = 10;           // logit updates per adaptation iteration
  int tau = 300;        // SGD steps after each aggregation (training and baselines)
  int tau_hat = 400;    // adaptation iterations after each test trial
  int n_train_tasks = 6;
  int trajectories_per_task = 4;
  int test_trials = 5;  // test-task rollouts during adaptation
  int eval_trials = 10;  // fresh rollouts used for scoring
  double corrupt_frac = 0.0;
  double init_scale = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError. K = 0 is accepted here (it disables reweighting);
  /// user-facing configuration requires K >= 1.
  void validate() const;
};

/// Rollouts of one method on one task, in order.
struct TrialMetrics {
  std::vector<RolloutLog> trials;

  std::size_t size() const { return trials.size(); }
  /// Step-weighted accuracy over all trials.
  double accuracy() const;
  int total_overrides() const;
  /// Cumulative override count after each trial.
  std::vector<int> cumulative_overrides() const;
};

struct BaseResult {
  PolicyParams params;  // theta*
  Dataset dataset;      // aggregated training data
};

struct WeightSnapshot {
  int iteration = 0;  // adaptation iterations completed when recorded
  WeightState weights;
};

struct AdaptResult {
  PolicyParams final_params;
  std::vector<WeightSnapshot> weight_trace;  // one per trial that ran at least one iteration
  TrialMetrics metrics;                      // the adaptation rollouts themselves
  std::vector<PolicyParams> params_after_trial;
  WeightState final_weights;
  Dataset test_dataset;
};

struct BaselineResult {
  PolicyParams final_params;
  TrialMetrics metrics;
  std::vector<PolicyParams> params_after_trial;
};

/// Train tasks get ids 0..n-1; the test task id is kTestTaskId.
inline constexpr int kTestTaskId = 1000;

std::vector<TaskSpec> make_train_tasks(std::uint64_t seed, const EnvConfig& env, int count);
TaskSpec make_test_task(std::uint64_t seed, const EnvConfig& env, int task_id = kTestTaskId);

/// theta ~ U[-init_scale, init_scale], seeded from the run seed.
PolicyParams initial_params(const TrainConfig& config, std::size_t dim);

/// For each task: trajectories_per_task DAgger rollouts of the current policy,
/// optional label corruption of the new data, union into the aggregate, then
/// tau full-batch SGD steps at alpha on the whole aggregate.
BaseResult train_base(std::span<const TaskSpec> train_tasks, const TrainConfig& config);

/// Importance-weighted adaptation starting from theta*. Per trial: one
/// rollout of the current policy extends the test set, then tau_hat
/// iterations of
///   - K logit updates aligning the P-weighted training gradient with the
///     mean test gradient,
///   - phi <- phi - beta * sum_n P_n grad_n(phi) over the training set.
/// Logits start at zero and persist across trials.
AdaptResult adapt(const PolicyParams& theta_star, const Dataset& train_dataset, const TaskSpec& test_task,
                  const TrainConfig& config);

/// DAgger continued on the test task from theta*: every trial's rollout is
/// unioned into the training aggregate, then tau uniform SGD steps at alpha.
BaselineResult continue_dagger(const PolicyParams& theta_star, const Dataset& train_dataset,
                               const TaskSpec& test_task, const TrainConfig& config);

/// train_base followed by continue_dagger.
BaselineResult baseline_dagger(std::span<const TaskSpec> train_tasks, const TaskSpec& test_task,
                               const TrainConfig& config);

/// DAgger on the test task alone from a random initialization.
BaselineResult baseline_finetune(const TaskSpec& test_task, const TrainConfig& config);

/// n_trials fresh rollouts scored against the expert; nothing is learned.
TrialMetrics evaluate(const PolicyParams& params, const TaskSpec& task, int n_trials, std::uint64_t seed);

}  // namespace iwil
