#pragma once

// Importance weights over the aggregated training set.
//
// The weights P = softmax(p) define a convex combination of per-sample
// training gradients. They are fitted so that this combination matches the
// average gradient on the test batch:
//
//   J(P) = || sum_n P_n g_n - g_test ||^2
//
// and p is moved by plain gradient descent on J through the softmax.

#include <cstddef>
#include <span>
#include <vector>

#include "iwil/kernels.hpp"
#include "iwil/policy.hpp"

namespace iwil {

/// Logits over the N training samples and their softmax image.
struct WeightState {
  std::vector<double> logits;
  std::vector<double> weights;

  /// Zero logits, uniform weights.
  static WeightState uniform(std::size_t n);
  static WeightState from_logits(std::vector<double> logits);

  std::size_t size() const { return logits.size(); }
  friend bool operator==(const WeightState&, const WeightState&) = default;
};

std::vector<double> softmax_weights(std::span<const double> logits);

/// diag(P) - P P^T as a dense row-major N×N matrix.
std::vector<double> softmax_jacobian(std::span<const double> weights);

/// sum_n weights[n] * grads.row(n)
GradientVec weighted_grad(std::span<const double> weights, const GradMatrix& grads);

/// || weighted_grad(weights, grads) - target ||^2
double alignment_cost(std::span<const double> weights, const GradMatrix& grads, const GradientVec& target);

/// dJ/dP_m = 2 <grads.row(m), weighted_grad - target>
std::vector<double> grad_wrt_weights(std::span<const double> weights, const GradMatrix& grads,
                                     const GradientVec& target);

/// dJ/dp through the softmax. Uses the product form P ⊙ (v - <P, v>) of
/// softmax_jacobian^T v, which avoids materializing the N×N Jacobian.
std::vector<double> grad_wrt_logits(const WeightState& state, const GradMatrix& grads, const GradientVec& target);

/// `steps` descent steps p <- p - gamma * dJ/dp, refreshing P after each.
WeightState update_logits(WeightState state, const GradMatrix& grads, const GradientVec& target, double gamma,
                          int steps);

}  // namespace iwil
