#pragma once

// Monte Carlo assurance estimation. Each replicate r draws from
// RngStream(master_seed, r): first the p coefficient deviates, then the
// n_rows noise deviates, then (unknown-variance case) the design variance
// and the inner posterior draws. Replicates are embarrassingly parallel
// and accumulate integer counts, so the estimate is identical for any
// worker count.

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "assure/conjugate_lm.hpp"
#include "assure/errors.hpp"
#include "assure/linalg.hpp"
#include "assure/statkit.hpp"

namespace assure {

struct MCSettings {
  int replicates = 1000;       // R, outer datasets
  int inner_samples = 500;     // J, posterior draws per dataset (unknown variance)
  std::uint64_t master_seed = 0;
  int worker_count = 1;

  MCSettings with_replicates(int r) const {
    MCSettings s = *this;
    s.replicates = r;
    return s;
  }
  MCSettings with_seed(std::uint64_t seed) const {
    MCSettings s = *this;
    s.master_seed = seed;
    return s;
  }
};

struct AssuranceEstimate {
  double estimate = 0.0;   // delta_hat
  double std_error = 0.0;  // sqrt(delta_hat (1 - delta_hat) / R)
  int replicates = 0;
  std::optional<int> inner_samples;
  std::uint64_t master_seed = 0;
};

namespace detail {

inline void validate_settings(const MCSettings& s) {
  if (s.replicates < 1) throw ConfigError("mc: replicates must be at least 1");
  if (s.inner_samples < 1) throw ConfigError("mc: inner_samples must be at least 1");
  if (s.worker_count < 1) throw ConfigError("mc: worker_count must be at least 1");
}

// Runs `favorable(r)` for r in [0, R) over `workers` threads and sums the
// hits. Chunk boundaries do not affect the result: replicate r is fully
// determined by (master_seed, r). A replicate exception is rethrown on the
// calling thread after the pool joins.
template <class Fn>
long long parallel_count(int replicates, int workers, Fn&& favorable) {
  if (workers > replicates) workers = replicates;
  if (workers <= 1) {
    long long count = 0;
    for (int r = 0; r < replicates; ++r)
      if (favorable(r)) ++count;
    return count;
  }
  std::vector<long long> partial(workers, 0);
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(replicates) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(replicates) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi, w]() {
      try {
        long long count = 0;
        for (int r = lo; r < hi; ++r)
          if (favorable(r)) ++count;
        partial[w] = count;
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
  long long total = 0;
  for (long long c : partial) total += c;
  return total;
}

inline AssuranceEstimate make_estimate(long long count, const MCSettings& settings,
                                       std::optional<int> inner) {
  const double r = static_cast<double>(settings.replicates);
  const double est = static_cast<double>(count) / r;
  return AssuranceEstimate{est, std::sqrt(est * (1.0 - est) / r), settings.replicates, inner,
                           settings.master_seed};
}

// Immutable per-configuration state shared by all replicates.
struct PreparedLM {
  const ModelDesign& design;
  const Vector x_mu;              // X mu_beta(design)
  const CholeskyFactor chol_vb;   // factor of Vb(design)
  const CholeskyFactor chol_minv; // factor of Vb^{-1}(analysis) + X'Vn^{-1}X
  const Vector m0;                // Vb^{-1}(analysis) mu_beta(analysis)
  const double mu_prec_quad;      // mu' Vb^{-1} mu (analysis)

  PreparedLM(const ModelDesign& d, const DesignPrior& dp, const AnalysisPrior& ap)
      : design(validated(d, dp, ap)),
        x_mu(d.X.matvec(dp.mu)),
        chol_vb(dp.cov),
        chol_minv(make_minv(d, ap)),
        m0(ap.precision.matvec(ap.mu)),
        mu_prec_quad(ap.precision.quad(ap.mu)) {
    if (!chol_minv.positive_definite())
      throw RankError("mc: posterior precision is singular (vague prior with rank-deficient "
                      "design)");
  }

  static const ModelDesign& validated(const ModelDesign& d, const DesignPrior& dp,
                                      const AnalysisPrior& ap) {
    const int p = d.X.cols();
    if (static_cast<int>(dp.mu.size()) != p || dp.cov.rows() != p ||
        static_cast<int>(ap.mu.size()) != p || ap.precision.rows() != p)
      throw DomainError("mc: prior dimension does not match the design matrix");
    if (d.Vn.rows() != d.X.rows())
      throw DomainError("mc: noise dimension does not match the design matrix");
    return d;
  }

  static CholeskyFactor make_minv(const ModelDesign& d, const AnalysisPrior& ap) {
    Matrix minv = xt_vinv_x(d.X, d.Vn);
    minv += ap.precision;
    return CholeskyFactor(minv);
  }

  // Unit-sigma composite X w + e with w ~ N(0, Vb), e ~ N(0, Vn); consumes
  // p + n_rows normal deviates in that order.
  Vector sample_unit_composite(RngStream& rng) const {
    Vector zb(design.X.cols());
    for (auto& v : zb) v = rng.normal();
    const Vector omega = chol_vb.apply_lower(zb);
    Vector y = design.Vn.sample_unit(rng);
    const int p = design.X.cols();
    for (int i = 0; i < design.X.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < p; ++j) s += design.X(i, j) * omega[j];
      y[i] += s;
    }
    return y;
  }

  Vector posterior_m(const Vector& vinv_y) const {
    Vector m = m0;
    const Vector xty = xt_apply(design.X, vinv_y);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += xty[j];
    return m;
  }
};

}  // namespace detail

/// Draw one dataset from the design-prior marginal
/// N(X mu, sigma^2 (X Vb X' + Vn)), composed as X mu + X w + e without ever
/// forming the dense row-by-row covariance.
inline Vector generate_design_data(const ModelDesign& design, const DesignPrior& dprior,
                                   double sigma2, RngStream& rng) {
  if (!(sigma2 > 0.0)) throw DomainError("generate_design_data: sigma2 must be positive");
  if (static_cast<int>(dprior.mu.size()) != design.X.cols())
    throw DomainError("generate_design_data: prior dimension does not match the design");
  const CholeskyFactor chol_vb(dprior.cov);
  Vector zb(design.X.cols());
  for (auto& v : zb) v = rng.normal();
  const Vector omega = chol_vb.apply_lower(zb);
  Vector y = design.Vn.sample_unit(rng);
  const double sigma = std::sqrt(sigma2);
  const int p = design.X.cols();
  Vector x_mu = design.X.matvec(dprior.mu);
  for (int i = 0; i < design.X.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += design.X(i, j) * omega[j];
    y[i] = x_mu[i] + sigma * (y[i] + s);
  }
  return y;
}

/// Assurance for H: u'b > C with known sigma^2 (data generated from the
/// design prior, decisions from the analysis-prior posterior).
inline AssuranceEstimate assurance_known_var(const ModelDesign& design, const DesignPrior& dprior,
                                             const AnalysisPrior& aprior, const Hypothesis& hyp,
                                             double sigma2, const MCSettings& settings) {
  detail::validate_settings(settings);
  if (!(sigma2 > 0.0)) throw DomainError("assurance_known_var: sigma2 must be positive");
  const detail::PreparedLM prep(design, dprior, aprior);
  const double sigma = std::sqrt(sigma2);
  const double unit_var = prep.chol_minv.quad_inv(hyp.u);
  if (!(unit_var > 0.0)) throw NumericError("assurance_known_var: u'Mu must be positive");
  const double denom = sigma * std::sqrt(unit_var);
  const double z_alpha = std_normal_quantile(hyp.alpha);

  const long long count = detail::parallel_count(
      settings.replicates, settings.worker_count, [&](int r) {
        RngStream rng(settings.master_seed, static_cast<std::uint64_t>(r));
        Vector y = prep.sample_unit_composite(rng);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = prep.x_mu[i] + sigma * y[i];
        const Vector vinv_y = design.Vn.apply_inverse(y);
        const Vector m = prep.posterior_m(vinv_y);
        const Vector mean = prep.chol_minv.solve(m);
        const double t = (hyp.C - dot(hyp.u, mean)) / denom;
        return t < z_alpha;
      });
  return detail::make_estimate(count, settings, std::nullopt);
}

/// Assurance with unknown sigma^2: design variance drawn from the design
/// IG prior, decisions from J joint posterior draws per dataset. The unit
/// composite is drawn before the variance so the data deviates line up
/// with the known-variance engine replicate by replicate.
inline AssuranceEstimate assurance_unknown_var(const ModelDesign& design,
                                               const DesignPrior& dprior,
                                               const AnalysisPrior& aprior, const Hypothesis& hyp,
                                               const MCSettings& settings) {
  detail::validate_settings(settings);
  if (!dprior.ig || !aprior.ig)
    throw ConfigError("assurance_unknown_var: design and analysis inverse-gamma priors are "
                      "required");
  const detail::PreparedLM prep(design, dprior, aprior);
  const double unit_var = prep.chol_minv.quad_inv(hyp.u);
  if (!(unit_var > 0.0)) throw NumericError("assurance_unknown_var: u'Mu must be positive");
  const Vector v = prep.chol_minv.solve_lower(hyp.u);
  const double a_star = aprior.ig->shape + 0.5 * design.X.rows();
  const IgParams ig_d = *dprior.ig;
  const IgParams ig_a = *aprior.ig;
  const int J = settings.inner_samples;
  const int p = design.X.cols();

  const long long count = detail::parallel_count(
      settings.replicates, settings.worker_count, [&](int r) {
        RngStream rng(settings.master_seed, static_cast<std::uint64_t>(r));
        Vector y = prep.sample_unit_composite(rng);
        const double sigma2_d = sample_inverse_gamma(ig_d.shape, ig_d.scale, rng);
        const double sigma_d = std::sqrt(sigma2_d);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = prep.x_mu[i] + sigma_d * y[i];

        const Vector vinv_y = design.Vn.apply_inverse(y);
        const Vector m = prep.posterior_m(vinv_y);
        const Vector mean = prep.chol_minv.solve(m);
        const double b_star =
            ig_a.scale + 0.5 * (prep.mu_prec_quad + dot(y, vinv_y) - dot(m, mean));
        const double center = dot(hyp.u, mean);

        int below = 0;
        for (int j = 0; j < J; ++j) {
          const double sigma2 = sample_inverse_gamma(a_star, b_star, rng);
          double proj = 0.0;
          for (int i = 0; i < p; ++i) proj += v[i] * rng.normal();
          if (center + std::sqrt(sigma2) * proj <= hyp.C) ++below;
        }
        return static_cast<double>(below) / static_cast<double>(J) <= hyp.alpha;
      });
  return detail::make_estimate(count, settings, J);
}

}  // namespace assure
