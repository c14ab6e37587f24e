#pragma once

// Bridge between the scalar closed forms and the linear-model Monte Carlo
// engine: X = 1_n, Vn = I_n, both priors centred at beta1, H: beta > beta0
// normalized to beta0 = 0.

#include <cmath>

#include "assure/assurance.hpp"
#include "assure/mc_engine.hpp"

namespace assure::scalar {

struct ScalarConfig {
  double delta = 0.0;  // beta1 - beta0, outcome units
  double sigma = 1.0;
  int n = 1;
  double n_a = 0.0;                  // analysis prior precision (0 = vague)
  double n_d = kInfinitePrecision;   // design prior precision (inf = point mass)
  double alpha = 0.05;
};

inline ModelDesign build_design(int n) {
  if (n < 1) throw DomainError("scalar: n must be at least 1");
  return ModelDesign{Matrix(n, 1, 1.0), NoiseCov::identity(n), n};
}

inline DesignPrior design_prior(const ScalarConfig& cfg) {
  if (!(cfg.n_d > 0.0)) throw DomainError("scalar: n_d must be positive");
  Matrix cov(1, 1);
  cov(0, 0) = std::isinf(cfg.n_d) ? 0.0 : 1.0 / cfg.n_d;
  return DesignPrior{{cfg.delta}, cov, std::nullopt};
}

inline AnalysisPrior analysis_prior(const ScalarConfig& cfg) {
  if (!(cfg.n_a >= 0.0)) throw DomainError("scalar: n_a must be nonnegative");
  Matrix prec(1, 1);
  prec(0, 0) = cfg.n_a;
  return AnalysisPrior{{cfg.delta}, prec, std::nullopt};
}

inline Hypothesis hypothesis(const ScalarConfig& cfg) { return Hypothesis{{1.0}, 0.0, cfg.alpha}; }

inline AssuranceEstimate assurance_known(const ScalarConfig& cfg, const MCSettings& settings) {
  return assurance_known_var(build_design(cfg.n), design_prior(cfg), analysis_prior(cfg),
                             hypothesis(cfg), cfg.sigma * cfg.sigma, settings);
}

inline AssuranceEstimate assurance_unknown(const ScalarConfig& cfg, const IgParams& ig_design,
                                           const IgParams& ig_analysis,
                                           const MCSettings& settings) {
  DesignPrior dp = design_prior(cfg);
  dp.ig = ig_design;
  AnalysisPrior ap = analysis_prior(cfg);
  ap.ig = ig_analysis;
  return assurance_unknown_var(build_design(cfg.n), dp, ap, hypothesis(cfg), settings);
}

inline double closed_form(const ScalarConfig& cfg) {
  return two_prior_assurance(cfg.delta, cfg.sigma, cfg.n, cfg.n_a, cfg.n_d, cfg.alpha);
}

}  // namespace assure::scalar
