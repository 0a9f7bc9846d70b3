#pragma once

// Multi-method experiment drivers shared by the command-line tool and the
// acceptance checks.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iwil/config.hpp"
#include "iwil/dagger.hpp"

namespace iwil {

/// Importance-weighted adaptation on a dataset with corrupted labels.
struct CorruptionRun {
  BaseResult base;
  AdaptResult adapted;
  double mean_weight_corrupted = 0.0;  // N * mean P over corrupted samples
  double mean_weight_clean = 0.0;
  std::size_t corrupted_count = 0;
};

CorruptionRun run_corruption(const RunConfig& config);

struct MethodCurve {
  std::string method;
  TrialMetrics metrics;               // adaptation rollouts
  std::vector<double> eval_accuracy;  // fresh-rollout accuracy after each trial
  PolicyParams final_params;
};

struct Comparison {
  BaseResult base;
  AdaptResult adapted;
  MethodCurve ours;
  MethodCurve dagger;
  MethodCurve finetune;
};

/// Trains theta*, then runs Ours, DAGGER and Fine-tune on the held-out task.
/// Each method is scored after every trial on the same eval rollouts.
Comparison run_comparison(const RunConfig& config);

struct RecoveryRun {
  double base_accuracy = 0.0;
  double adapted_accuracy = 0.0;
};

/// One adaptation iteration of theta* on training task `task_index`.
RecoveryRun run_recovery(const RunConfig& config, int task_index = 0);

/// Seed used for scoring rollouts; independent of the adaptation rollouts.
std::uint64_t eval_seed(const TrainConfig& config);

/// Writes metrics_<method>.csv for each method of the comparison plus
/// weights.csv and params_<name>.bin.
void write_comparison(const std::filesystem::path& dir, const Comparison& cmp);

}  // namespace iwil
