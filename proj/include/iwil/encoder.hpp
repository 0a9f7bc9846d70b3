#pragma once

// Synthetic stand-in for a learned perception model. A task's theme maps the
// raw geometric observation to the policy input through a fixed linear mix
// plus Gaussian noise, which gives every task its own covariate shift while
// leaving the expert's decision rule unchanged.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iwil/rng.hpp"

namespace iwil {

inline constexpr std::uint64_t kThemeFamilySeed = 0x5eed7e3e;

struct Theme {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::vector<double> mix;  // dim × dim, row-major
  double noise_scale = 0.0;

  static Theme identity(std::size_t dim);

  /// Themes lie on a one-parameter family shared by all tasks of a given
  /// dimension: mix(x) = cayley(x·S) · diag(exp(x·c)), with S a fixed
  /// skew-symmetric generator (unit spectral norm) and c a fixed profile in
  /// [-1, 1]^d. The seed picks x uniformly in [-shift, shift]; shift = 0
  /// gives the identity. Throws ConfigError if the condition number of the
  /// result is not below 100.
  static Theme from_seed(std::uint64_t seed, std::size_t dim, double shift, double noise_scale);

  /// Ratio of largest to smallest singular value of `mix`.
  double condition_number() const;
  /// Row-major inverse of `mix`.
  std::vector<double> inverse_mix() const;

  friend bool operator==(const Theme&, const Theme&) = default;
};

/// Maps a raw observation to the policy's state vector.
class FeatureEncoder {
 public:
  virtual ~FeatureEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> encode(std::span<const double> raw, Rng& stream) const = 0;
};

class ThemeEncoder final : public FeatureEncoder {
 public:
  explicit ThemeEncoder(const Theme& theme) : theme_(&theme) {}
  std::size_t dim() const override { return theme_->dim; }
  std::vector<double> encode(std::span<const double> raw, Rng& stream) const override;

 private:
  const Theme* theme_;
};

/// mix · raw + noise_scale · eta, eta ~ N(0, I) drawn from `stream`. Always
/// consumes `dim` normals so stream positions do not depend on the noise level.
std::vector<double> encode(const Theme& theme, std::span<const double> raw, Rng& stream);

}  // namespace iwil
