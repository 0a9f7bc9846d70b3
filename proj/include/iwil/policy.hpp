#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "iwil/rng.hpp"

namespace iwil {

/// Parameters of the single-layer softmax policy.
///
/// Stored flat: the A×d weight matrix in row-major order followed by the A
/// bias entries. Gradients use the same layout, so an SGD step is a plain
/// elementwise update.
class PolicyParams {
 public:
  PolicyParams() = default;
  PolicyParams(std::size_t actions, std::size_t dim);
  PolicyParams(std::size_t actions, std::size_t dim, std::vector<double> flat);

  static PolicyParams zeros(std::size_t actions, std::size_t dim) { return {actions, dim}; }
  /// Entries drawn uniformly from [-scale, scale].
  static PolicyParams random_uniform(std::size_t actions, std::size_t dim, double scale, Rng& rng);

  std::size_t actions() const { return actions_; }
  std::size_t dim() const { return dim_; }
  std::size_t flat_size() const { return values_.size(); }

  double weight(std::size_t action, std::size_t j) const { return values_[action * dim_ + j]; }
  double& weight(std::size_t action, std::size_t j) { return values_[action * dim_ + j]; }
  double bias(std::size_t action) const { return values_[actions_ * dim_ + action]; }
  double& bias(std::size_t action) { return values_[actions_ * dim_ + action]; }

  std::span<const double> flat() const { return values_; }
  std::span<double> flat() { return values_; }

  bool all_finite() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  std::size_t actions_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

constexpr std::size_t flat_size(std::size_t actions, std::size_t dim) { return actions * dim + actions; }

/// One labelled state. `corrupted` records provenance for analysis only; the
/// learner never reads it.
struct Sample {
  std::vector<double> state;
  int action = 0;
  int task_id = 0;
  int step = 0;
  bool corrupted = false;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Flattened gradient with the PolicyParams layout.
struct GradientVec {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const GradientVec&, const GradientVec&) = default;
};

/// softmax(W·state + b), computed with max-subtraction.
std::vector<double> forward(const PolicyParams& params, std::span<const double> state);

/// -log pi(action | state), evaluated through log-sum-exp.
double nll_loss(const PolicyParams& params, const Sample& sample);

/// Mean NLL over a batch.
double mean_nll(const PolicyParams& params, std::span<const Sample> samples);

/// Closed-form gradient of nll_loss: weight row k is (pi_k - [k == action]) * state,
/// bias entry k is (pi_k - [k == action]).
GradientVec per_sample_grad(const PolicyParams& params, const Sample& sample);

/// Writes per_sample_grad into `out` (length flat_size). Used by the batched kernels.
void per_sample_grad_into(const PolicyParams& params, const Sample& sample, std::span<double> out);

/// Mean of per-sample gradients, summed left to right. Throws on an empty batch.
GradientVec batch_grad(const PolicyParams& params, std::span<const Sample> samples);

/// params - step * grad. Throws unless step > 0.
PolicyParams sgd_step(const PolicyParams& params, const GradientVec& grad, double step);

/// Argmax of forward; ties go to the lowest index.
int predict(const PolicyParams& params, std::span<const double> state);

/// Index of the largest entry, lowest index on ties.
int argmax(std::span<const double> values);

}  // namespace iwil
