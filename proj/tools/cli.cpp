#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "iwil/config.hpp"
#include "iwil/error.hpp"
#include "iwil/experiments.hpp"
#include "iwil/io.hpp"

namespace iwil::cli {
namespace fs = std::filesystem;

namespace {

// Config flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "key=value configuration file");
    for (const auto& key : config_keys()) {
      std::string names = "--" + key;
      if (key.find('_') != std::string::npos) {
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        names = "--" + dashed + ",--" + key;
      }
      options[key] = app.add_option(names, values[key], "config key " + key)
                         ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  std::map<std::string, std::string> flags() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) out[key] = values.at(key);
    return out;
  }

  std::map<std::string, std::string> file() const {
    return config_path.empty() ? std::map<std::string, std::string>{} : read_config_file(config_path);
  }

  RunConfig resolve() const { return resolve_config(file(), flags()); }
};

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void check_shape(const PolicyParams& params, const RunConfig& config) {
  if (params.actions() != config.actions) throw DimensionError("params action count", config.actions, params.actions());
  if (params.dim() != config.env.dim) throw DimensionError("params input dimension", config.env.dim, params.dim());
}

void check_shape(const Dataset& data, const RunConfig& config) {
  if (data.empty()) throw IoError("dataset is empty");
  if (data.front().state.size() != config.env.dim)
    throw DimensionError("dataset state dimension", config.env.dim, data.front().state.size());
}

void report(std::ostream& out, const MethodCurve& c) {
  out << c.method << ": eval accuracy per trial";
  for (double a : c.eval_accuracy) out << ' ' << a;
  out << "; cumulative overrides";
  for (int o : c.metrics.cumulative_overrides()) out << ' ' << o;
  out << '\n';
}

int cmd_train(const Common& common, std::ostream& out) {
  const RunConfig config = common.resolve();
  const fs::path dir = config.out_dir;
  ensure_writable_dir(dir);
  const auto tasks = make_train_tasks(config.train.seed, config.env, config.train.n_train_tasks);
  const BaseResult base = train_base(tasks, config.train);
  write_dataset_csv(dir / "dataset.csv", base.dataset);
  write_params(dir / "params_base.bin", base.params);
  out << "trained on " << base.dataset.size() << " samples; mean NLL " << mean_nll(base.params, base.dataset)
      << "\nwrote " << (dir / "dataset.csv").string() << " and " << (dir / "params_base.bin").string() << '\n';
  return kExitOk;
}

int cmd_adapt(const Common& common, const std::string& params_path, const std::string& dataset_path,
              bool baselines, std::ostream& out) {
  const RunConfig config = common.resolve();
  const fs::path dir = config.out_dir;
  ensure_writable_dir(dir);
  const PolicyParams theta = read_params(or_default(params_path, dir / "params_base.bin"));
  check_shape(theta, config);
  const Dataset data = read_dataset_csv(or_default(dataset_path, dir / "dataset.csv"));
  check_shape(data, config);

  const TrainConfig& tc = config.train;
  const TaskSpec test = make_test_task(tc.seed, config.env);
  const AdaptResult adapted = adapt(theta, data, test, tc);
  write_metrics_csv(dir / "metrics_ours.csv", "ours", adapted.metrics);
  write_weights_csv(dir / "weights.csv", adapted.weight_trace, data);
  write_params(dir / "params_ours.bin", adapted.final_params);

  auto curve = [&](std::string name, const TrialMetrics& m, const std::vector<PolicyParams>& after) {
    MethodCurve c{std::move(name), m, {}, {}};
    for (const auto& p : after) c.eval_accuracy.push_back(evaluate(p, test, tc.eval_trials, eval_seed(tc)).accuracy());
    return c;
  };
  report(out, curve("ours", adapted.metrics, adapted.params_after_trial));
  if (baselines) {
    const BaselineResult dag = continue_dagger(theta, data, test, tc);
    const BaselineResult ft = baseline_finetune(test, tc);
    write_metrics_csv(dir / "metrics_dagger.csv", "dagger", dag.metrics);
    write_metrics_csv(dir / "metrics_finetune.csv", "finetune", ft.metrics);
    write_params(dir / "params_dagger.bin", dag.final_params);
    write_params(dir / "params_finetune.bin", ft.final_params);
    report(out, curve("dagger", dag.metrics, dag.params_after_trial));
    report(out, curve("finetune", ft.metrics, ft.params_after_trial));
  }
  return kExitOk;
}

int cmd_eval(const Common& common, const std::string& params_path, bool expert, int task_index,
             const std::string& name, std::ostream& out) {
  const RunConfig config = common.resolve();
  const fs::path dir = config.out_dir;
  ensure_writable_dir(dir);
  TaskSpec task;
  if (task_index < 0) {
    task = make_test_task(config.train.seed, config.env);
  } else {
    const auto tasks = make_train_tasks(config.train.seed, config.env, config.train.n_train_tasks);
    if (task_index >= static_cast<int>(tasks.size())) throw ConfigError("--task must be below n_train_tasks");
    task = tasks[static_cast<std::size_t>(task_index)];
  }
  PolicyParams params;
  if (expert) {
    params = expert_policy_params(task);
    write_params(dir / "params_expert.bin", params);
  } else {
    if (params_path.empty()) throw ConfigError("eval needs --params or --expert");
    params = read_params(params_path);
  }
  check_shape(params, config);
  const TrialMetrics m = evaluate(params, task, config.train.eval_trials, eval_seed(config.train));
  write_metrics_csv(dir / ("metrics_" + name + ".csv"), name, m);
  out << name << ": accuracy " << m.accuracy() << ", overrides " << m.total_overrides() << " over "
      << m.size() << " trials\n";
  return kExitOk;
}

int cmd_corrupt(const Common& common, std::ostream& out) {
  auto file = common.file();
  auto flags = common.flags();
  if (!file.contains("corrupt_frac") && !flags.contains("corrupt_frac")) flags["corrupt_frac"] = "0.5";
  const RunConfig config = resolve_config(file, flags);
  const fs::path dir = config.out_dir;
  ensure_writable_dir(dir);
  const CorruptionRun run = run_corruption(config);
  write_dataset_csv(dir / "dataset.csv", run.base.dataset);
  write_params(dir / "params_base.bin", run.base.params);
  write_params(dir / "params_ours.bin", run.adapted.final_params);
  write_metrics_csv(dir / "metrics_ours.csv", "ours", run.adapted.metrics);
  write_weights_csv(dir / "weights.csv", run.adapted.weight_trace, run.base.dataset);
  out << run.corrupted_count << " of " << run.base.dataset.size() << " labels corrupted\n"
      << "mean N*P: corrupted " << run.mean_weight_corrupted << ", clean " << run.mean_weight_clean << '\n';
  return kExitOk;
}

int cmd_dump(const Common& common, const std::string& weights_path, const std::string& dataset_path,
             std::ostream& out) {
  const RunConfig config = common.resolve();
  const fs::path dir = config.out_dir;
  ensure_writable_dir(dir);
  const auto trace = read_weights_csv(or_default(weights_path, dir / "weights.csv"));
  if (trace.empty()) throw IoError("weights file has no snapshots");
  const Dataset data = read_dataset_csv(or_default(dataset_path, dir / "dataset.csv"));
  if (trace.back().weights.size() != data.size())
    throw DimensionError("weight vector vs dataset", data.size(), trace.back().weights.size());
  write_weight_colormap_csv(dir / "weights_colormap.csv", trace.back().weights, data);
  out << "wrote " << (dir / "weights_colormap.csv").string() << " from iteration " << trace.back().iteration << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"importance-weighted meta-imitation learning in a corridor world", "iwil"};
  app.require_subcommand(1);

  Common c_train, c_adapt, c_eval, c_corrupt, c_dump;
  auto* train = app.add_subcommand("train", "DAgger over the training tasks; writes dataset.csv and params_base.bin");
  c_train.attach(*train);

  std::string adapt_params, adapt_dataset;
  bool baselines = false;
  auto* adapt_cmd = app.add_subcommand("adapt", "importance-weighted adaptation to the held-out task");
  c_adapt.attach(*adapt_cmd);
  adapt_cmd->add_option("--params", adapt_params, "theta* file (default <out-dir>/params_base.bin)");
  adapt_cmd->add_option("--dataset", adapt_dataset, "training aggregate (default <out-dir>/dataset.csv)");
  adapt_cmd->add_flag("--baselines", baselines, "also run the DAgger and fine-tune baselines");

  std::string eval_params, eval_name = "eval";
  bool eval_expert = false;
  int eval_task = -1;
  auto* eval_cmd = app.add_subcommand("eval", "score a policy on fresh expert-labelled rollouts");
  c_eval.attach(*eval_cmd);
  eval_cmd->add_option("--params", eval_params, "policy file");
  eval_cmd->add_flag("--expert", eval_expert, "score the task's linear expert (also writes params_expert.bin)");
  eval_cmd->add_option("--task", eval_task, "training task index, or -1 for the held-out task");
  eval_cmd->add_option("--name", eval_name, "method label, used in metrics_<name>.csv");

  auto* corrupt = app.add_subcommand("corrupt-exp", "adaptation with corrupted training labels (corrupt_frac 0.5 unless set)");
  c_corrupt.attach(*corrupt);

  std::string dump_weights, dump_dataset;
  auto* dump = app.add_subcommand("dump-weights", "final weights as a trajectory x step matrix");
  c_dump.attach(*dump);
  dump->add_option("--weights", dump_weights, "weights.csv (default <out-dir>/weights.csv)");
  dump->add_option("--dataset", dump_dataset, "dataset.csv (default <out-dir>/dataset.csv)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(c_train, out);
    if (adapt_cmd->parsed()) return cmd_adapt(c_adapt, adapt_params, adapt_dataset, baselines, out);
    if (eval_cmd->parsed()) return cmd_eval(c_eval, eval_params, eval_expert, eval_task, eval_name, out);
    if (corrupt->parsed()) return cmd_corrupt(c_corrupt, out);
    if (dump->parsed()) return cmd_dump(c_dump, dump_weights, dump_dataset, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DimensionError& e) {
    err << "shape error: " << e.what() << '\n';
    return kExitShape;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}

}  // namespace iwil::cli
