#pragma once

// Closed-form power and assurance curves for the scalar one-sample design,
// including the vague-analysis / precise-design limits.

#include <cmath>
#include <limits>

#include "assure/errors.hpp"
#include "assure/statkit.hpp"

namespace assure {

inline constexpr double kInfinitePrecision = std::numeric_limits<double>::infinity();

namespace detail {
inline void check_scalar_args(double sigma, double n, double alpha) {
  if (!(sigma > 0.0)) throw DomainError("assurance: sigma must be positive");
  if (!(n > 0.0)) throw DomainError("assurance: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("assurance: alpha must lie in (0,1)");
}
}  // namespace detail

/// Frequentist power for detecting effect delta = b1 - b0 at one-sided
/// level alpha with n observations.
inline double freq_power(double delta, double sigma, double n, double alpha) {
  detail::check_scalar_args(sigma, n, alpha);
  return std_normal_cdf(std::sqrt(n) * delta / sigma + std_normal_quantile(alpha));
}

/// Assurance when one Gaussian prior with precision n0 ("prior sample
/// size") plays both the design and analysis role. Tends to 0.5 as the
/// prior becomes vague, and to 1{delta > 0} as it becomes precise.
inline double single_prior_assurance(double delta, double sigma, double n, double n0,
                                     double alpha) {
  detail::check_scalar_args(sigma, n, alpha);
  if (!(n0 >= 0.0)) throw DomainError("single_prior_assurance: n0 must be nonnegative");
  const double bracket =
      std::sqrt(1.0 + n0 / n) * (delta / sigma) + std_normal_quantile(alpha) * std::sqrt(1.0 / n);
  return std_normal_cdf(std::sqrt(n0) * bracket);
}

/// Assurance with separate priors: analysis precision n_a, design
/// precision n_d. n_d may be +infinity, in which case the design-marginal
/// factor sqrt(n n_d / (n + n_d)) is replaced by its limit sqrt(n)
/// symbolically. At (n_a, n_d) = (0, inf) this is the frequentist power.
inline double two_prior_assurance(double delta, double sigma, double n, double n_a, double n_d,
                                  double alpha) {
  detail::check_scalar_args(sigma, n, alpha);
  if (!(n_a >= 0.0)) throw DomainError("two_prior_assurance: n_a must be nonnegative");
  if (!(n_d > 0.0)) throw DomainError("two_prior_assurance: n_d must be positive");
  const double bracket = ((n + n_a) / n) * (delta / sigma) +
                         std_normal_quantile(alpha) * std::sqrt(n + n_a) / n;
  const double factor =
      std::isinf(n_d) ? std::sqrt(n) : std::sqrt(n * n_d / (n + n_d));
  return std_normal_cdf(factor * bracket);
}

}  // namespace assure
