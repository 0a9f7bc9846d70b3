#pragma once

// File formats written by the command-line tool.
//
//   dataset.csv          task_id,step,s_0,...,s_{d-1},action,corrupted
//   metrics_<method>.csv method,trial,timestep,overrides_cum,accuracy
//   weights.csv          iter,sample_index,logit,weight,corrupted
//   params_<name>.bin    int32 A, int32 d, int32 version, then A*d+A
//                        little-endian float64 in flattening order
//
// Reals are printed in shortest round-trip form so a dataset read back is
// bit-identical to the one written.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iwil/dagger.hpp"

namespace iwil {

inline constexpr std::int32_t kParamsFormatVersion = 1;

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
/// Throws IoError on unreadable or malformed files.
Dataset read_dataset_csv(const std::filesystem::path& path);

/// One row per step of every trial; `timestep` counts across trials, and
/// `accuracy` is the accuracy of the trial the step belongs to.
void write_metrics_csv(const std::filesystem::path& path, const std::string& method, const TrialMetrics& metrics);

void write_weights_csv(const std::filesystem::path& path, const std::vector<WeightSnapshot>& trace,
                       const Dataset& train_dataset);
/// Throws IoError on unreadable or malformed files. Snapshots come back in
/// file order; `corrupted` receives the flag column of the last snapshot.
std::vector<WeightSnapshot> read_weights_csv(const std::filesystem::path& path, std::vector<bool>* corrupted = nullptr);

/// Final weights laid out as a matrix: one row per collected trajectory
/// (task_id, trajectory), one column per step. Header `task_id,trajectory,w_0,...`.
void write_weight_colormap_csv(const std::filesystem::path& path, const WeightState& weights,
                               const Dataset& train_dataset);

void write_params(const std::filesystem::path& path, const PolicyParams& params);
/// Throws IoError on unreadable or malformed files.
PolicyParams read_params(const std::filesystem::path& path);

/// Creates the directory if needed and checks that it accepts files.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace iwil
