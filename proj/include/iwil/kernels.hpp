#pragma once

// Data-parallel inner loops of the learner.
//
// Each kernel has a serial reference and an OpenMP version. The parallel
// versions split work so that every output element is still reduced in
// index order by a single thread; both produce bit-identical results for
// any thread count. The reference versions stay around for the tests and
// the benchmark.

#include <cstddef>
#include <span>
#include <vector>

#include "iwil/policy.hpp"

namespace iwil {

/// N per-sample gradients of common length D, stored row-major.
class GradMatrix {
 public:
  GradMatrix() = default;
  GradMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  GradMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t n) const { return {data_.data() + n * cols_, cols_}; }
  std::span<double> row(std::size_t n) { return {data_.data() + n * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  void resize(std::size_t rows, std::size_t cols);

  friend bool operator==(const GradMatrix&, const GradMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace kernels {

namespace serial {

void per_sample_grads(const PolicyParams& params, std::span<const Sample> samples, GradMatrix& out);

/// out = sum_n weights[n] * grads.row(n), accumulated for n = 0, 1, ...
void weighted_row_sum(std::span<const double> weights, const GradMatrix& grads, std::span<double> out);

/// out[n] = <grads.row(n), v>
void row_dots(const GradMatrix& grads, std::span<const double> v, std::span<double> out);

}  // namespace serial

namespace parallel {

void per_sample_grads(const PolicyParams& params, std::span<const Sample> samples, GradMatrix& out);
void weighted_row_sum(std::span<const double> weights, const GradMatrix& grads, std::span<double> out);
void row_dots(const GradMatrix& grads, std::span<const double> v, std::span<double> out);

}  // namespace parallel

}  // namespace kernels

/// Stacked per-sample gradients at `params` (parallel kernel).
GradMatrix per_sample_grads(const PolicyParams& params, std::span<const Sample> samples);

}  // namespace iwil
