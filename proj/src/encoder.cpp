#include "iwil/encoder.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "iwil/error.hpp"

namespace iwil {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const Theme& t) {
  return Eigen::Map<const RowMatrix>(t.mix.data(), static_cast<Eigen::Index>(t.dim),
                                     static_cast<Eigen::Index>(t.dim));
}

}  // namespace

Theme Theme::identity(std::size_t dim) {
  Theme t;
  t.dim = dim;
  t.mix.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) t.mix[i * dim + i] = 1.0;
  return t;
}

Theme Theme::from_seed(std::uint64_t seed, std::size_t dim, double shift, double noise_scale) {
  if (dim == 0) throw ConfigError("theme dimension must be positive");
  if (!(shift >= 0.0) || !(noise_scale >= 0.0)) throw ConfigError("theme shift and noise must be nonnegative");
  const auto n = static_cast<Eigen::Index>(dim);

  // Shared family: a fixed skew-symmetric generator and log-scale profile.
  Rng family = make_rng(kThemeFamilySeed, {tag(Stream::kTheme), dim});
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  RowMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(family);
  RowMatrix skew = 0.5 * (g - g.transpose());
  const double spectral = skew.operatorNorm();
  if (spectral > 0.0) skew /= spectral;
  Eigen::VectorXd log_scale(n);
  for (Eigen::Index j = 0; j < n; ++j) log_scale(j) = uniform(family);

  // Per-theme position along the family.
  Rng rng = make_rng(seed, {tag(Stream::kTheme)});
  const double position = shift * uniform(rng);

  // Cayley transform: orthogonal for any skew-symmetric argument.
  const RowMatrix id = RowMatrix::Identity(n, n);
  const RowMatrix half = 0.5 * position * skew;
  const RowMatrix rotation = (id - half).partialPivLu().solve(id + half);
  const Eigen::VectorXd scales = (position * log_scale).array().exp();
  const RowMatrix mix = rotation * scales.asDiagonal();

  Theme t;
  t.seed = seed;
  t.dim = dim;
  t.noise_scale = noise_scale;
  t.mix.assign(mix.data(), mix.data() + mix.size());
  const double cond = t.condition_number();
  if (!(cond < 100.0)) throw ConfigError("theme mix is ill-conditioned (condition number " + std::to_string(cond) + ")");
  return t;
}

double Theme::condition_number() const {
  Eigen::JacobiSVD<RowMatrix> svd(view(*this));
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

std::vector<double> Theme::inverse_mix() const {
  const RowMatrix inv = view(*this).inverse();
  return {inv.data(), inv.data() + inv.size()};
}

std::vector<double> encode(const Theme& theme, std::span<const double> raw, Rng& stream) {
  expect_length("raw observation", theme.dim, raw.size());
  std::normal_distribution<double> normal;
  std::vector<double> out(theme.dim);
  for (std::size_t i = 0; i < theme.dim; ++i) {
    double acc = 0.0;
    const double* row = theme.mix.data() + i * theme.dim;
    for (std::size_t j = 0; j < theme.dim; ++j) acc += row[j] * raw[j];
    out[i] = acc;
  }
  for (std::size_t i = 0; i < theme.dim; ++i) out[i] += theme.noise_scale * normal(stream);
  return out;
}

std::vector<double> ThemeEncoder::encode(std::span<const double> raw, Rng& stream) const {
  return iwil::encode(*theme_, raw, stream);
}

}  // namespace iwil
