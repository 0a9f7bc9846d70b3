#include <algorithm>

#include "iwil/error.hpp"
#include "iwil/kernels.hpp"

namespace iwil {
namespace {

// Below this many rows the fork/join cost dominates.
constexpr std::ptrdiff_t kParallelRows = 256;
constexpr std::ptrdiff_t kColumnBlock = 8;

}  // namespace

namespace kernels::parallel {

void per_sample_grads(const PolicyParams& params, std::span<const Sample> samples, GradMatrix& out) {
  if (out.rows() != samples.size() || out.cols() != params.flat_size())
    out.resize(samples.size(), params.flat_size());
  const auto n_rows = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static) if (n_rows >= kParallelRows)
  for (std::ptrdiff_t n = 0; n < n_rows; ++n) {
    per_sample_grad_into(params, samples[static_cast<std::size_t>(n)], out.row(static_cast<std::size_t>(n)));
  }
}

// Threads own disjoint column blocks and sweep every row, so each output
// entry is accumulated in row order exactly as in the serial version.
void weighted_row_sum(std::span<const double> weights, const GradMatrix& grads, std::span<double> out) {
  expect_length("weights", grads.rows(), weights.size());
  expect_length("weighted sum output", grads.cols(), out.size());
  const auto cols = static_cast<std::ptrdiff_t>(grads.cols());
  const std::size_t rows = grads.rows();
  const std::ptrdiff_t blocks = (cols + kColumnBlock - 1) / kColumnBlock;
  const auto data = grads.data();
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(rows) >= kParallelRows)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t lo = b * kColumnBlock;
    const std::ptrdiff_t hi = std::min(cols, lo + kColumnBlock);
    double acc[kColumnBlock] = {};
    for (std::size_t n = 0; n < rows; ++n) {
      const double w = weights[n];
      const double* row = data.data() + n * static_cast<std::size_t>(cols);
      for (std::ptrdiff_t j = lo; j < hi; ++j) acc[j - lo] += w * row[j];
    }
    for (std::ptrdiff_t j = lo; j < hi; ++j) out[static_cast<std::size_t>(j)] = acc[j - lo];
  }
}

void row_dots(const GradMatrix& grads, std::span<const double> v, std::span<double> out) {
  expect_length("dot operand", grads.cols(), v.size());
  expect_length("row dot output", grads.rows(), out.size());
  const auto n_rows = static_cast<std::ptrdiff_t>(grads.rows());
#pragma omp parallel for schedule(static) if (n_rows >= kParallelRows)
  for (std::ptrdiff_t n = 0; n < n_rows; ++n) {
    const auto row = grads.row(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += row[j] * v[j];
    out[static_cast<std::size_t>(n)] = acc;
  }
}

}  // namespace kernels::parallel

GradMatrix per_sample_grads(const PolicyParams& params, std::span<const Sample> samples) {
  GradMatrix out(samples.size(), params.flat_size());
  kernels::parallel::per_sample_grads(params, samples, out);
  return out;
}

}  // namespace iwil
