#include "iwil/reweight.hpp"

#include <algorithm>
#include <cmath>

#include "iwil/error.hpp"

namespace iwil {

WeightState WeightState::uniform(std::size_t n) { return from_logits(std::vector<double>(n, 0.0)); }

WeightState WeightState::from_logits(std::vector<double> logits) {
  WeightState s;
  s.weights = softmax_weights(logits);
  s.logits = std::move(logits);
  return s;
}

std::vector<double> softmax_weights(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax of an empty logit vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    w[i] = std::exp(logits[i] - m);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> softmax_jacobian(std::span<const double> weights) {
  const std::size_t n = weights.size();
  std::vector<double> jac(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) jac[i * n + j] = (i == j ? weights[i] : 0.0) - weights[i] * weights[j];
  return jac;
}

GradientVec weighted_grad(std::span<const double> weights, const GradMatrix& grads) {
  GradientVec out{std::vector<double>(grads.cols())};
  kernels::parallel::weighted_row_sum(weights, grads, out.values);
  return out;
}

namespace {

std::vector<double> residual(std::span<const double> weights, const GradMatrix& grads, const GradientVec& target) {
  expect_length("alignment target", grads.cols(), target.size());
  GradientVec r = weighted_grad(weights, grads);
  for (std::size_t j = 0; j < r.values.size(); ++j) r.values[j] -= target.values[j];
  return std::move(r.values);
}

}  // namespace

double alignment_cost(std::span<const double> weights, const GradMatrix& grads, const GradientVec& target) {
  const auto r = residual(weights, grads, target);
  double cost = 0.0;
  for (double v : r) cost += v * v;
  return cost;
}

std::vector<double> grad_wrt_weights(std::span<const double> weights, const GradMatrix& grads,
                                     const GradientVec& target) {
  const auto r = residual(weights, grads, target);
  std::vector<double> g(grads.rows());
  kernels::parallel::row_dots(grads, r, g);
  for (double& v : g) v *= 2.0;
  return g;
}

std::vector<double> grad_wrt_logits(const WeightState& state, const GradMatrix& grads, const GradientVec& target) {
  expect_length("weight state", grads.rows(), state.weights.size());
  std::vector<double> g = grad_wrt_weights(state.weights, grads, target);
  double mean = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) mean += state.weights[n] * g[n];
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = state.weights[n] * (g[n] - mean);
  return g;
}

WeightState update_logits(WeightState state, const GradMatrix& grads, const GradientVec& target, double gamma,
                          int steps) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (steps < 1) throw ConfigError("K must be at least 1");
  expect_length("weight state", grads.rows(), state.logits.size());
  for (int k = 0; k < steps; ++k) {
    const auto g = grad_wrt_logits(state, grads, target);
    for (std::size_t n = 0; n < g.size(); ++n) state.logits[n] -= gamma * g[n];
    state.weights = softmax_weights(state.logits);
  }
  return state;
}

}  // namespace iwil
