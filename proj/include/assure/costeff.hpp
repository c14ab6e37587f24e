#pragma once

// Cost-effectiveness trial builders in the O'Hagan-Stevens setup: two arms,
// per-patient efficacy and cost observations, net monetary benefit contrast
// xi = K (mu2 - mu1) - (g2 - g1) with coefficient order b = (mu1, g1, mu2, g2).
// Rows are grouped as (efficacy arm 1, cost arm 1, efficacy arm 2, cost arm 2).

#include <cmath>
#include <utility>

#include "assure/conjugate_lm.hpp"
#include "assure/errors.hpp"
#include "assure/mc_engine.hpp"

namespace assure::costeff {

struct CostEffConfig {
  double K = 0.0;            // threshold unit cost
  int n = 1;                 // per-arm sample size
  double sigma2 = 16.3216;   // efficacy sampling variance (sd 4.04)
  double tau2 = 7.569e7;     // cost sampling variance (sd 8700)
  double alpha = 0.025;
};

inline ModelDesign build_design(const CostEffConfig& cfg) {
  if (cfg.n < 1) throw DomainError("costeff: n must be at least 1");
  if (!(cfg.sigma2 > 0.0) || !(cfg.tau2 > 0.0))
    throw DomainError("costeff: sampling variances must be positive");
  const int n = cfg.n;
  Matrix X(4 * n, 4);
  Vector diag(4 * n, 1.0);
  const double ratio = cfg.tau2 / cfg.sigma2;
  for (int block = 0; block < 4; ++block) {
    const bool cost_block = (block % 2) == 1;
    for (int i = 0; i < n; ++i) {
      const int row = block * n + i;
      X(row, block) = 1.0;
      if (cost_block) diag[row] = ratio;
    }
  }
  return ModelDesign{std::move(X), NoiseCov::diagonal(std::move(diag)), n};
}

inline Hypothesis build_contrast(double K, double alpha = 0.025) {
  if (!(K >= 0.0)) throw DomainError("costeff: K must be nonnegative");
  return Hypothesis{Vector{-K, 1.0, K, -1.0}, 0.0, alpha};
}

/// Published design prior (absolute units) and the weak analysis prior.
inline std::pair<DesignPrior, AnalysisPrior> ohagan_priors() {
  Matrix cov(4, 4);
  cov(0, 0) = 4.0;
  cov(1, 1) = 1e7;
  cov(2, 2) = 4.0;
  cov(3, 3) = 1e7;
  cov(0, 2) = 3.0;
  cov(2, 0) = 3.0;
  DesignPrior dp{Vector{5.0, 6000.0, 6.5, 7200.0}, std::move(cov), std::nullopt};
  return {std::move(dp), AnalysisPrior::vague(4)};
}

/// Rescales an absolute-unit design covariance to the conjugate
/// parameterization, where the coefficient prior covariance carries a
/// sigma^2 factor.
inline DesignPrior to_conjugate(DesignPrior prior, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("costeff: sigma2 must be positive");
  for (int i = 0; i < prior.cov.rows(); ++i)
    for (int j = 0; j < prior.cov.cols(); ++j) prior.cov(i, j) /= sigma2;
  return prior;
}

/// Assurance for H: xi > 0 under the published priors with known variances.
inline AssuranceEstimate assurance(const CostEffConfig& cfg, const MCSettings& settings) {
  auto [dp, ap] = ohagan_priors();
  return assurance_known_var(build_design(cfg), to_conjugate(std::move(dp), cfg.sigma2), ap,
                             build_contrast(cfg.K, cfg.alpha), cfg.sigma2, settings);
}

/// Unknown-variance variant; IG hyperparameters are caller-supplied.
inline AssuranceEstimate assurance_unknown(const CostEffConfig& cfg, const IgParams& ig_design,
                                           const IgParams& ig_analysis,
                                           const MCSettings& settings) {
  auto [dp, ap] = ohagan_priors();
  dp = to_conjugate(std::move(dp), cfg.sigma2);
  dp.ig = ig_design;
  ap.ig = ig_analysis;
  return assurance_unknown_var(build_design(cfg), dp, ap, build_contrast(cfg.K, cfg.alpha),
                               settings);
}

}  // namespace assure::costeff
