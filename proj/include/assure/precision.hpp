#pragma once

// Precision-based sample size (Adcock's condition): the analysis objective
// holds when the posterior of the mean puts at least 1-alpha mass on
// [xbar - d, xbar + d].

#include <cmath>

#include "assure/errors.hpp"
#include "assure/mc_engine.hpp"
#include "assure/statkit.hpp"

namespace assure::precision {

struct PrecisionConfig {
  int n = 1;             // sample size
  double d = 1.0;        // precision half-width
  double theta0_a = 0.0; // analysis prior mean
  double theta0_d = 0.0; // design prior mean
  double n_a = 0.0;      // analysis prior precision (0 = vague)
  double n_d = 1.0;      // design prior precision (may be +inf)
  double sigma2 = 1.0;   // known sampling variance
  double alpha = 0.05;
};

// The literal variant evaluates the coverage window at a posterior draw of
// theta instead of at xbar; the two disagree (the theta draw adds posterior
// noise, so with a vague analysis prior the coverage indicator is no
// longer deterministic).
enum class PrecisionMode { CoverageAtXbar, ThetaDraw };

namespace detail {
inline void validate(const PrecisionConfig& cfg) {
  if (cfg.n < 1) throw DomainError("precision: n must be at least 1");
  if (!(cfg.d > 0.0)) throw DomainError("precision: d must be positive");
  if (!(cfg.sigma2 > 0.0)) throw DomainError("precision: sigma2 must be positive");
  if (!(cfg.n_a >= 0.0)) throw DomainError("precision: n_a must be nonnegative");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw DomainError("precision: alpha must lie in (0,1)");
}
}  // namespace detail

/// Posterior probability that |xbar - theta| <= d, as a function of the
/// observed sample mean. With n_a = 0 this is 2 Phi(sqrt(n) d / sigma) - 1,
/// independent of xbar.
inline double inner_coverage(double xbar, const PrecisionConfig& cfg) {
  detail::validate(cfg);
  const double sigma = std::sqrt(cfg.sigma2);
  const double lambda = (cfg.n * xbar + cfg.n_a * cfg.theta0_a) / (cfg.n_a + cfg.n);
  const double scale = std::sqrt(cfg.n_a + cfg.n) / sigma;
  return std_normal_cdf(scale * (xbar + cfg.d - lambda)) -
         std_normal_cdf(scale * (xbar - cfg.d - lambda));
}

inline AssuranceEstimate assurance(const PrecisionConfig& cfg, const MCSettings& settings,
                                   PrecisionMode mode = PrecisionMode::CoverageAtXbar) {
  detail::validate(cfg);
  assure::detail::validate_settings(settings);
  if (!(cfg.n_d > 0.0)) throw DomainError("precision: n_d must be positive");
  const double sigma = std::sqrt(cfg.sigma2);
  const double marg_sd = sigma * std::sqrt(1.0 / cfg.n + 1.0 / cfg.n_d);
  const double target = 1.0 - cfg.alpha;

  const long long count = assure::detail::parallel_count(
      settings.replicates, settings.worker_count, [&](int r) {
        RngStream rng(settings.master_seed, static_cast<std::uint64_t>(r));
        const double xbar = cfg.theta0_d + marg_sd * rng.normal();
        double coverage;
        if (mode == PrecisionMode::CoverageAtXbar) {
          coverage = inner_coverage(xbar, cfg);
        } else {
          const double lambda = (cfg.n * xbar + cfg.n_a * cfg.theta0_a) / (cfg.n_a + cfg.n);
          const double post_sd = sigma / std::sqrt(cfg.n_a + cfg.n);
          const double theta = lambda + post_sd * rng.normal();
          const double scale = std::sqrt(cfg.n_a + cfg.n) / sigma;
          coverage = std_normal_cdf(scale * (theta + cfg.d - lambda)) -
                     std_normal_cdf(scale * (theta - cfg.d - lambda));
        }
        return coverage >= target;
      });
  return assure::detail::make_estimate(count, settings, std::nullopt);
}

/// Smallest n with z_{1-alpha/2} sigma / sqrt(n) <= d.
inline int freq_sample_size(double d, double sigma, double alpha) {
  if (!(d > 0.0) || !(sigma > 0.0)) throw DomainError("precision: d and sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("precision: alpha must lie in (0,1)");
  const double z = std_normal_quantile(1.0 - alpha / 2.0);
  return static_cast<int>(std::ceil(z * z * sigma * sigma / (d * d)));
}

}  // namespace assure::precision
