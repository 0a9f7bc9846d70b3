#include <algorithm>

#include "iwil/error.hpp"
#include "iwil/kernels.hpp"

namespace iwil {

GradMatrix::GradMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  expect_length("gradient matrix storage", rows * cols, data_.size());
}

void GradMatrix::resize(std::size_t rows, std::size_t cols) {
  rows_ = rows;
  cols_ = cols;
  data_.assign(rows * cols, 0.0);
}

namespace kernels::serial {

void per_sample_grads(const PolicyParams& params, std::span<const Sample> samples, GradMatrix& out) {
  if (out.rows() != samples.size() || out.cols() != params.flat_size())
    out.resize(samples.size(), params.flat_size());
  for (std::size_t n = 0; n < samples.size(); ++n) per_sample_grad_into(params, samples[n], out.row(n));
}

void weighted_row_sum(std::span<const double> weights, const GradMatrix& grads, std::span<double> out) {
  expect_length("weights", grads.rows(), weights.size());
  expect_length("weighted sum output", grads.cols(), out.size());
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t n = 0; n < grads.rows(); ++n) {
    const auto row = grads.row(n);
    const double w = weights[n];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * row[j];
  }
}

void row_dots(const GradMatrix& grads, std::span<const double> v, std::span<double> out) {
  expect_length("dot operand", grads.cols(), v.size());
  expect_length("row dot output", grads.rows(), out.size());
  for (std::size_t n = 0; n < grads.rows(); ++n) {
    const auto row = grads.row(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += row[j] * v[j];
    out[n] = acc;
  }
}

}  // namespace kernels::serial
}  // namespace iwil
