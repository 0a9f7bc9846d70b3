#include "iwil/dagger.hpp"

#include <numeric>

#include "iwil/error.hpp"

namespace iwil {

void TrainConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)) throw ConfigError("alpha, beta and gamma must be positive");
  if (K < 0) throw ConfigError("K must be nonnegative");
  if (tau < 0 || tau_hat < 0) throw ConfigError("tau and tau_hat must be nonnegative");
  if (n_train_tasks < 1 || trajectories_per_task < 1) throw ConfigError("need at least one train task and trajectory");
  if (test_trials < 0 || eval_trials < 1) throw ConfigError("test_trials must be >= 0 and eval_trials >= 1");
  if (!(corrupt_frac >= 0.0 && corrupt_frac <= 1.0)) throw ConfigError("corrupt_frac must lie in [0, 1]");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be nonnegative");
}

double TrialMetrics::accuracy() const {
  std::size_t hits = 0;
  std::size_t steps = 0;
  for (const auto& log : trials) {
    for (std::size_t i = 0; i < log.steps(); ++i) hits += log.agent_actions[i] == log.labels[i] ? 1 : 0;
    steps += log.steps();
  }
  return steps == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(steps);
}

int TrialMetrics::total_overrides() const {
  int total = 0;
  for (const auto& log : trials) total += static_cast<int>(log.overrides.size());
  return total;
}

std::vector<int> TrialMetrics::cumulative_overrides() const {
  std::vector<int> out;
  int total = 0;
  for (const auto& log : trials) {
    total += static_cast<int>(log.overrides.size());
    out.push_back(total);
  }
  return out;
}

std::vector<TaskSpec> make_train_tasks(std::uint64_t seed, const EnvConfig& env, int count) {
  std::vector<TaskSpec> tasks;
  for (int i = 0; i < count; ++i)
    tasks.push_back(make_task(derive_seed(seed, {tag(Stream::kTask), 0, static_cast<std::uint64_t>(i)}), env, i));
  return tasks;
}

TaskSpec make_test_task(std::uint64_t seed, const EnvConfig& env, int task_id) {
  return make_task(derive_seed(seed, {tag(Stream::kTask), 1}), env, task_id);
}

PolicyParams initial_params(const TrainConfig& config, std::size_t dim) {
  Rng rng = make_rng(config.seed, {tag(Stream::kInit)});
  return PolicyParams::random_uniform(kNumActions, dim, config.init_scale, rng);
}

namespace {

// tau full-batch steps of mean-NLL descent; the gradient goes through the
// same per-sample matrix and weighted sum as the adaptation loop.
PolicyParams fit(PolicyParams params, const Dataset& data, int steps, double rate, GradMatrix& scratch) {
  if (data.empty() || steps == 0) return params;
  const std::vector<double> uniform(data.size(), 1.0 / static_cast<double>(data.size()));
  GradientVec g{std::vector<double>(params.flat_size())};
  for (int t = 0; t < steps; ++t) {
    kernels::parallel::per_sample_grads(params, data, scratch);
    kernels::parallel::weighted_row_sum(uniform, scratch, g.values);
    params = sgd_step(params, g, rate);
  }
  return params;
}

Rng trial_rng(const TrainConfig& config, const TaskSpec& task, int trial) {
  return make_rng(config.seed, {tag(Stream::kTestRollout), static_cast<std::uint64_t>(task.task_id),
                                static_cast<std::uint64_t>(trial)});
}

void check_dims(const PolicyParams& params, const TaskSpec& task) {
  expect_length("policy input vs task observation", task.env.dim, params.dim());
  if (params.actions() != kNumActions) throw DimensionError("policy action count", kNumActions, params.actions());
}

}  // namespace

BaseResult train_base(std::span<const TaskSpec> train_tasks, const TrainConfig& config) {
  config.validate();
  if (train_tasks.empty()) throw ConfigError("train_base needs at least one training task");
  BaseResult out{initial_params(config, train_tasks.front().env.dim), {}};
  GradMatrix scratch;
  for (std::size_t i = 0; i < train_tasks.size(); ++i) {
    const TaskSpec& task = train_tasks[i];
    check_dims(out.params, task);
    Dataset fresh;
    for (int j = 0; j < config.trajectories_per_task; ++j) {
      Rng rng = make_rng(config.seed, {tag(Stream::kTrainRollout), static_cast<std::uint64_t>(task.task_id),
                                       static_cast<std::uint64_t>(j)});
      auto log = rollout(out.params, task, true, rng);
      fresh.insert(fresh.end(), std::make_move_iterator(log.samples.begin()),
                   std::make_move_iterator(log.samples.end()));
    }
    if (config.corrupt_frac > 0.0) {
      Rng rng = make_rng(config.seed, {tag(Stream::kCorrupt), static_cast<std::uint64_t>(task.task_id)});
      fresh = corrupt_labels(std::move(fresh), config.corrupt_frac, rng);
    }
    out.dataset.insert(out.dataset.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
    out.params = fit(std::move(out.params), out.dataset, config.tau, config.alpha, scratch);
  }
  return out;
}

AdaptResult adapt(const PolicyParams& theta_star, const Dataset& train_dataset, const TaskSpec& test_task,
                  const TrainConfig& config) {
  config.validate();
  if (train_dataset.empty()) throw ConfigError("adapt needs a nonempty training set");
  check_dims(theta_star, test_task);
  expect_length("training states vs policy input", theta_star.dim(), train_dataset.front().state.size());

  AdaptResult out;
  out.final_params = theta_star;
  WeightState weights = WeightState::uniform(train_dataset.size());
  GradMatrix train_grads;
  GradMatrix test_grads;
  GradientVec step_grad{std::vector<double>(theta_star.flat_size())};
  int iteration = 0;

  for (int trial = 0; trial < config.test_trials; ++trial) {
    Rng rng = trial_rng(config, test_task, trial);
    auto log = rollout(out.final_params, test_task, true, rng);
    out.test_dataset.insert(out.test_dataset.end(), log.samples.begin(), log.samples.end());
    out.metrics.trials.push_back(std::move(log));

    const std::vector<double> test_uniform(out.test_dataset.size(),
                                           1.0 / static_cast<double>(out.test_dataset.size()));
    GradientVec target{std::vector<double>(theta_star.flat_size())};
    for (int t = 0; t < config.tau_hat; ++t, ++iteration) {
      PolicyParams& phi = out.final_params;
      kernels::parallel::per_sample_grads(phi, train_dataset, train_grads);
      if (config.K > 0) {
        kernels::parallel::per_sample_grads(phi, out.test_dataset, test_grads);
        kernels::parallel::weighted_row_sum(test_uniform, test_grads, target.values);
        weights = update_logits(std::move(weights), train_grads, target, config.gamma, config.K);
      }
      kernels::parallel::weighted_row_sum(weights.weights, train_grads, step_grad.values);
      phi = sgd_step(phi, step_grad, config.beta);
    }
    if (config.tau_hat > 0) out.weight_trace.push_back({iteration, weights});
    out.params_after_trial.push_back(out.final_params);
  }
  out.final_weights = std::move(weights);
  return out;
}

BaselineResult continue_dagger(const PolicyParams& theta_star, const Dataset& train_dataset,
                               const TaskSpec& test_task, const TrainConfig& config) {
  config.validate();
  check_dims(theta_star, test_task);
  BaselineResult out{theta_star, {}, {}};
  Dataset aggregate = train_dataset;
  GradMatrix scratch;
  for (int trial = 0; trial < config.test_trials; ++trial) {
    Rng rng = trial_rng(config, test_task, trial);
    auto log = rollout(out.final_params, test_task, true, rng);
    aggregate.insert(aggregate.end(), log.samples.begin(), log.samples.end());
    out.metrics.trials.push_back(std::move(log));
    out.final_params = fit(std::move(out.final_params), aggregate, config.tau, config.alpha, scratch);
    out.params_after_trial.push_back(out.final_params);
  }
  return out;
}

BaselineResult baseline_dagger(std::span<const TaskSpec> train_tasks, const TaskSpec& test_task,
                               const TrainConfig& config) {
  const BaseResult base = train_base(train_tasks, config);
  return continue_dagger(base.params, base.dataset, test_task, config);
}

BaselineResult baseline_finetune(const TaskSpec& test_task, const TrainConfig& config) {
  config.validate();
  return continue_dagger(initial_params(config, test_task.env.dim), {}, test_task, config);
}

TrialMetrics evaluate(const PolicyParams& params, const TaskSpec& task, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw ConfigError("evaluation needs at least one trial");
  check_dims(params, task);
  TrialMetrics out;
  for (int trial = 0; trial < n_trials; ++trial) {
    Rng rng = make_rng(seed, {tag(Stream::kEval), static_cast<std::uint64_t>(task.task_id),
                              static_cast<std::uint64_t>(trial)});
    auto log = rollout(params, task, true, rng);
    log.samples.clear();
    out.trials.push_back(std::move(log));
  }
  return out;
}

}  // namespace iwil
