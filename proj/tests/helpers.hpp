#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "iwil/kernels.hpp"
#include "iwil/policy.hpp"
#include "iwil/rng.hpp"

namespace iwil::testing {

inline std::vector<double> random_vector(std::size_t n, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline std::vector<Sample> random_samples(std::size_t n, std::size_t dim, std::size_t actions, Rng& rng) {
  std::uniform_int_distribution<int> a(0, static_cast<int>(actions) - 1);
  std::vector<Sample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].state = random_vector(dim, 1.0, rng);
    out[i].action = a(rng);
    out[i].step = static_cast<int>(i);
  }
  return out;
}

inline GradMatrix random_grads(std::size_t rows, std::size_t cols, Rng& rng) {
  return GradMatrix(rows, cols, random_vector(rows * cols, 1.0, rng));
}

/// Central differences of f at x with step h.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||, floor)
inline double rel_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(IWIL_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace iwil::testing
