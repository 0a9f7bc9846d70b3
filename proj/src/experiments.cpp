#include "iwil/experiments.hpp"

#include "iwil/error.hpp"
#include "iwil/io.hpp"

namespace iwil {

std::uint64_t eval_seed(const TrainConfig& config) { return derive_seed(config.seed, {tag(Stream::kEval)}); }

CorruptionRun run_corruption(const RunConfig& config) {
  const auto tasks = make_train_tasks(config.train.seed, config.env, config.train.n_train_tasks);
  const TaskSpec test = make_test_task(config.train.seed, config.env);
  CorruptionRun out;
  out.base = train_base(tasks, config.train);
  out.adapted = adapt(out.base.params, out.base.dataset, test, config.train);

  const auto& w = out.adapted.final_weights.weights;
  double sum_bad = 0.0;
  double sum_good = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (out.base.dataset[n].corrupted) {
      sum_bad += w[n];
      ++out.corrupted_count;
    } else {
      sum_good += w[n];
    }
  }
  const double scale = static_cast<double>(w.size());
  const std::size_t clean = w.size() - out.corrupted_count;
  if (out.corrupted_count > 0) out.mean_weight_corrupted = scale * sum_bad / static_cast<double>(out.corrupted_count);
  if (clean > 0) out.mean_weight_clean = scale * sum_good / static_cast<double>(clean);
  return out;
}

namespace {

MethodCurve score(std::string method, TrialMetrics metrics, const std::vector<PolicyParams>& after_trial,
                  PolicyParams final_params, const TaskSpec& task, const TrainConfig& config) {
  MethodCurve curve{std::move(method), std::move(metrics), {}, std::move(final_params)};
  for (const auto& p : after_trial)
    curve.eval_accuracy.push_back(evaluate(p, task, config.eval_trials, eval_seed(config)).accuracy());
  return curve;
}

}  // namespace

Comparison run_comparison(const RunConfig& config) {
  const TrainConfig& tc = config.train;
  const auto tasks = make_train_tasks(tc.seed, config.env, tc.n_train_tasks);
  const TaskSpec test = make_test_task(tc.seed, config.env);
  Comparison cmp;
  cmp.base = train_base(tasks, tc);
  cmp.adapted = adapt(cmp.base.params, cmp.base.dataset, test, tc);
  cmp.ours = score("ours", cmp.adapted.metrics, cmp.adapted.params_after_trial, cmp.adapted.final_params, test, tc);
  auto dag = continue_dagger(cmp.base.params, cmp.base.dataset, test, tc);
  cmp.dagger = score("dagger", std::move(dag.metrics), dag.params_after_trial, std::move(dag.final_params), test, tc);
  auto ft = baseline_finetune(test, tc);
  cmp.finetune = score("finetune", std::move(ft.metrics), ft.params_after_trial, std::move(ft.final_params), test, tc);
  return cmp;
}

RecoveryRun run_recovery(const RunConfig& config, int task_index) {
  const auto tasks = make_train_tasks(config.train.seed, config.env, config.train.n_train_tasks);
  if (task_index < 0 || task_index >= static_cast<int>(tasks.size()))
    throw ConfigError("recovery task index out of range");
  const TaskSpec& task = tasks[static_cast<std::size_t>(task_index)];
  const BaseResult base = train_base(tasks, config.train);
  TrainConfig one = config.train;
  one.test_trials = 1;
  one.tau_hat = 1;
  const AdaptResult adapted = adapt(base.params, base.dataset, task, one);
  const std::uint64_t seed = eval_seed(config.train);
  return {evaluate(base.params, task, config.train.eval_trials, seed).accuracy(),
          evaluate(adapted.final_params, task, config.train.eval_trials, seed).accuracy()};
}

void write_comparison(const std::filesystem::path& dir, const Comparison& cmp) {
  ensure_writable_dir(dir);
  for (const MethodCurve* c : {&cmp.ours, &cmp.dagger, &cmp.finetune}) {
    write_metrics_csv(dir / ("metrics_" + c->method + ".csv"), c->method, c->metrics);
    write_params(dir / ("params_" + c->method + ".bin"), c->final_params);
  }
  write_params(dir / "params_base.bin", cmp.base.params);
  write_weights_csv(dir / "weights.csv", cmp.adapted.weight_trace, cmp.base.dataset);
}

}  // namespace iwil
