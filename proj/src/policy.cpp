#include "iwil/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iwil/error.hpp"
#include "iwil/kernels.hpp"

namespace iwil {

PolicyParams::PolicyParams(std::size_t actions, std::size_t dim)
    : actions_(actions), dim_(dim), values_(iwil::flat_size(actions, dim), 0.0) {
  if (actions == 0 || dim == 0) throw DimensionError("policy needs at least one action and one input");
}

PolicyParams::PolicyParams(std::size_t actions, std::size_t dim, std::vector<double> flat)
    : actions_(actions), dim_(dim), values_(std::move(flat)) {
  if (actions == 0 || dim == 0) throw DimensionError("policy needs at least one action and one input");
  expect_length("policy parameter vector", iwil::flat_size(actions, dim), values_.size());
}

PolicyParams PolicyParams::random_uniform(std::size_t actions, std::size_t dim, double scale, Rng& rng) {
  PolicyParams p(actions, dim);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : p.values_) v = u(rng);
  return p;
}

bool PolicyParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void logits_into(const PolicyParams& params, std::span<const double> state, std::span<double> out) {
  expect_length("policy input", params.dim(), state.size());
  const std::size_t d = params.dim();
  const auto flat = params.flat();
  for (std::size_t k = 0; k < params.actions(); ++k) {
    double z = params.bias(k);
    const double* w = flat.data() + k * d;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * state[j];
    out[k] = z;
  }
}

void softmax_inplace(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : z) v /= total;
}

void check_action(const PolicyParams& params, int action) {
  if (action < 0 || static_cast<std::size_t>(action) >= params.actions())
    throw DimensionError("action " + std::to_string(action) + " outside [0, " +
                         std::to_string(params.actions()) + ")");
}

}  // namespace

std::vector<double> forward(const PolicyParams& params, std::span<const double> state) {
  std::vector<double> probs(params.actions());
  logits_into(params, state, probs);
  softmax_inplace(probs);
  return probs;
}

double nll_loss(const PolicyParams& params, const Sample& sample) {
  check_action(params, sample.action);
  std::vector<double> z(params.actions());
  logits_into(params, sample.state, z);
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - m);
  // log-sum-exp minus the label logit; clamp tiny negative rounding.
  return std::max(0.0, m + std::log(total) - z[static_cast<std::size_t>(sample.action)]);
}

double mean_nll(const PolicyParams& params, std::span<const Sample> samples) {
  if (samples.empty()) throw DimensionError("mean_nll of an empty batch");
  double total = 0.0;
  for (const Sample& s : samples) total += nll_loss(params, s);
  return total / static_cast<double>(samples.size());
}

void per_sample_grad_into(const PolicyParams& params, const Sample& sample, std::span<double> out) {
  check_action(params, sample.action);
  expect_length("gradient buffer", params.flat_size(), out.size());
  const std::size_t a = params.actions();
  const std::size_t d = params.dim();
  // Bias block doubles as scratch for the probabilities.
  std::span<double> bias = out.subspan(a * d, a);
  logits_into(params, sample.state, bias);
  softmax_inplace(bias);
  bias[static_cast<std::size_t>(sample.action)] -= 1.0;
  for (std::size_t k = 0; k < a; ++k) {
    const double r = bias[k];
    double* row = out.data() + k * d;
    for (std::size_t j = 0; j < d; ++j) row[j] = r * sample.state[j];
  }
}

GradientVec per_sample_grad(const PolicyParams& params, const Sample& sample) {
  GradientVec g{std::vector<double>(params.flat_size())};
  per_sample_grad_into(params, sample, g.values);
  return g;
}

GradientVec batch_grad(const PolicyParams& params, std::span<const Sample> samples) {
  if (samples.empty()) throw DimensionError("batch_grad of an empty batch");
  const GradMatrix grads = per_sample_grads(params, samples);
  const std::vector<double> uniform(samples.size(), 1.0 / static_cast<double>(samples.size()));
  GradientVec g{std::vector<double>(params.flat_size())};
  kernels::parallel::weighted_row_sum(uniform, grads, g.values);
  return g;
}

PolicyParams sgd_step(const PolicyParams& params, const GradientVec& grad, double step) {
  if (!(step > 0.0)) throw ConfigError("sgd step size must be positive");
  expect_length("gradient", params.flat_size(), grad.size());
  PolicyParams next = params;
  auto flat = next.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] -= step * grad.values[i];
  return next;
}

int argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return static_cast<int>(best);
}

int predict(const PolicyParams& params, std::span<const double> state) {
  return argmax(forward(params, state));
}

}  // namespace iwil
