#pragma once

// Two-proportion assurance in the beta-binomial setting (Pham-Gia style):
// the analysis objective is a moment-based posterior credible interval for
// p1 - p2 that excludes zero.

#include <cmath>

#include "assure/errors.hpp"
#include "assure/mc_engine.hpp"
#include "assure/statkit.hpp"

namespace assure::betabinom {

// psi: where the design-stage proportions come from.
enum class ProportionSource { DrawFromPrior = 0, Exact = 1 };

struct PropDesign {
  int n1 = 1;
  int n2 = 1;
  double alpha1 = 1.0, beta1 = 1.0;  // analysis priors Beta(alpha_i, beta_i)
  double alpha2 = 1.0, beta2 = 1.0;
  ProportionSource psi = ProportionSource::DrawFromPrior;
  double p1 = -1.0, p2 = -1.0;       // required when psi = Exact
  double alpha = 0.05;
};

struct DiffMoments {
  double mean;
  double variance;
};

namespace detail {
inline void validate(const PropDesign& d) {
  if (d.n1 < 1 || d.n2 < 1) throw DomainError("betabinom: arm sizes must be at least 1");
  if (!(d.alpha1 > 0.0 && d.beta1 > 0.0 && d.alpha2 > 0.0 && d.beta2 > 0.0))
    throw DomainError("betabinom: beta prior parameters must be positive");
  if (!(d.alpha > 0.0 && d.alpha < 1.0)) throw DomainError("betabinom: alpha must lie in (0,1)");
  if (d.psi == ProportionSource::Exact &&
      !(d.p1 > 0.0 && d.p1 < 1.0 && d.p2 > 0.0 && d.p2 < 1.0))
    throw ConfigError("betabinom: exact proportions p1, p2 in (0,1) are required when psi = 1");
}

inline double beta_post_var(double a, double b, int n, int x) {
  const double s = a + b + n;
  return (a + x) * (b + n - x) / (s * s * (s + 1.0));
}
}  // namespace detail

/// Posterior mean and variance of p1 - p2 given arm counts x1, x2.
inline DiffMoments posterior_diff_moments(int x1, int x2, const PropDesign& d) {
  detail::validate(d);
  if (x1 < 0 || x1 > d.n1 || x2 < 0 || x2 > d.n2)
    throw DomainError("betabinom: counts must lie in [0, n_i]");
  const double mean = (d.alpha1 + x1) / (d.alpha1 + d.beta1 + d.n1) -
                      (d.alpha2 + x2) / (d.alpha2 + d.beta2 + d.n2);
  const double var = detail::beta_post_var(d.alpha1, d.beta1, d.n1, x1) +
                     detail::beta_post_var(d.alpha2, d.beta2, d.n2, x2);
  return {mean, var};
}

/// Per replicate: obtain (p1, p2) exactly or from the beta priors, draw the
/// arm counts, and check whether the credible interval for p1 - p2
/// excludes zero.
inline AssuranceEstimate assurance_two_prop(const PropDesign& d, const MCSettings& settings) {
  detail::validate(d);
  assure::detail::validate_settings(settings);
  const double z = std_normal_quantile(1.0 - d.alpha / 2.0);
  const long long count = assure::detail::parallel_count(
      settings.replicates, settings.worker_count, [&](int r) {
        RngStream rng(settings.master_seed, static_cast<std::uint64_t>(r));
        double p1, p2;
        if (d.psi == ProportionSource::Exact) {
          p1 = d.p1;
          p2 = d.p2;
        } else {
          p1 = sample_beta(d.alpha1, d.beta1, rng);
          p2 = sample_beta(d.alpha2, d.beta2, rng);
        }
        const int x1 = sample_binomial(d.n1, p1, rng);
        const int x2 = sample_binomial(d.n2, p2, rng);
        const DiffMoments mom = posterior_diff_moments(x1, x2, d);
        const double half = z * std::sqrt(mom.variance);
        return 0.0 < mom.mean - half || 0.0 > mom.mean + half;
      });
  return assure::detail::make_estimate(count, settings, std::nullopt);
}

/// Frequentist power of the two-proportion z-test at equal per-arm size n.
inline double freq_prop_power(double p1, double p2, double n, double alpha) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0))
    throw DomainError("freq_prop_power: proportions must lie strictly in (0,1)");
  if (!(n >= 1.0)) throw DomainError("freq_prop_power: n must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("freq_prop_power: alpha must lie in (0,1)");
  const double spread = std::sqrt(p1 * (1.0 - p1) + p2 * (1.0 - p2));
  return std_normal_cdf(std::sqrt(n) * std::abs(p1 - p2) / spread -
                        std_normal_quantile(1.0 - alpha / 2.0));
}

}  // namespace assure::betabinom
