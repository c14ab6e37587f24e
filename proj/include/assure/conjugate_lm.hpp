#pragma once

// Conjugate Bayesian linear regression: y = X b + e, e ~ N(0, sigma^2 Vn),
// b ~ N(mu, sigma^2 Vb), optionally sigma^2 ~ IG(a, b). Analysis priors are
// stored as precision matrices so the vague prior is exactly the zero matrix;
// design priors are stored as covariances.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "assure/errors.hpp"
#include "assure/linalg.hpp"
#include "assure/statkit.hpp"

namespace assure {

struct IgParams {
  double shape = 0.0;  // a
  double scale = 0.0;  // b
};

struct AnalysisPrior {
  Vector mu;                     // mu_beta (analysis)
  Matrix precision;              // Vb^{-1}, zero matrix encodes the vague prior
  std::optional<IgParams> ig;    // prior on sigma^2, when unknown

  static AnalysisPrior vague(int p) { return {Vector(p, 0.0), Matrix(p, p), std::nullopt}; }
};

struct DesignPrior {
  Vector mu;                     // mu_beta (design)
  Matrix cov;                    // Vb, in units of sigma^2
  std::optional<IgParams> ig;
};

/// Noise correlation Vn, tagged so structured forms keep inverse products O(n).
class NoiseCov {
 public:
  static NoiseCov identity(int n) { return NoiseCov(Vector(n, 1.0)); }

  static NoiseCov diagonal(Vector d) {
    for (double v : d)
      if (!(v > 0.0)) throw DomainError("NoiseCov: diagonal entries must be positive");
    return NoiseCov(std::move(d));
  }

  static NoiseCov dense(Matrix v) { return NoiseCov(std::move(v)); }

  int rows() const { return diag_.empty() ? dense_chol_->dim() : static_cast<int>(diag_.size()); }
  bool is_diagonal() const { return !diag_.empty(); }

  Vector apply_inverse(const Vector& y) const {
    if (is_diagonal()) {
      Vector r(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] / diag_[i];
      return r;
    }
    return dense_chol_->solve(y);
  }

  double quad_inv(const Vector& y) const {
    if (is_diagonal()) {
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * y[i] / diag_[i];
      return s;
    }
    return dense_chol_->quad_inv(y);
  }

  /// Draw from N(0, Vn); consumes exactly rows() normal deviates.
  Vector sample_unit(RngStream& rng) const {
    const int n = rows();
    Vector z(n);
    for (auto& v : z) v = rng.normal();
    if (is_diagonal()) {
      for (int i = 0; i < n; ++i) z[i] *= std::sqrt(diag_[i]);
      return z;
    }
    return dense_chol_->apply_lower(z);
  }

 private:
  explicit NoiseCov(Vector d) : diag_(std::move(d)) {}
  explicit NoiseCov(Matrix v) : dense_chol_(CholeskyFactor(v)) {
    if (!dense_chol_->positive_definite())
      throw DomainError("NoiseCov: dense correlation must be positive definite");
  }

  Vector diag_;
  std::optional<CholeskyFactor> dense_chol_;
};

struct ModelDesign {
  Matrix X;     // n_rows x p
  NoiseCov Vn;  // n_rows x n_rows
  int n;        // design size parameter (per-arm size for grouped designs)
};

struct Hypothesis {
  Vector u;      // contrast
  double C;      // threshold; H: u'b > C
  double alpha;  // credibility level
};

struct Posterior {
  Matrix M;                       // (Vb^{-1} + X'Vn^{-1}X)^{-1}
  Vector m;                       // Vb^{-1} mu + X'Vn^{-1} y
  Vector mean;                    // M m
  CholeskyFactor chol_precision;  // factor of M^{-1}
  double a_star;                  // a + n_rows/2, NaN without an IG prior
  double b_star;
  bool has_ig;

  double contrast_mean(const Vector& u) const { return dot(u, mean); }
  /// u' M u, evaluated through the precision factor.
  double contrast_unit_variance(const Vector& u) const { return chol_precision.quad_inv(u); }
};

namespace detail {

inline Matrix xt_vinv_x(const Matrix& X, const NoiseCov& Vn) {
  const int p = X.cols();
  Matrix out(p, p);
  // out = X' (Vn^{-1} X), column by column; O(n p^2) for structured Vn.
  for (int j = 0; j < p; ++j) {
    Vector col(X.rows());
    for (int i = 0; i < X.rows(); ++i) col[i] = X(i, j);
    const Vector vcol = Vn.apply_inverse(col);
    for (int i = 0; i < p; ++i) {
      double s = 0.0;
      for (int r = 0; r < X.rows(); ++r) s += X(r, i) * vcol[r];
      out(i, j) = s;
    }
  }
  // Symmetrize.
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

inline Vector xt_apply(const Matrix& X, const Vector& y) {
  const int p = X.cols();
  Vector out(p, 0.0);
  for (int i = 0; i < X.rows(); ++i) {
    const double yi = y[i];
    for (int j = 0; j < p; ++j) out[j] += X(i, j) * yi;
  }
  return out;
}

}  // namespace detail

inline Posterior posterior_update(const Vector& y, const ModelDesign& design,
                                  const AnalysisPrior& prior) {
  const int p = design.X.cols();
  if (static_cast<int>(y.size()) != design.X.rows())
    throw DomainError("posterior_update: y length does not match the design matrix");

  Matrix minv = detail::xt_vinv_x(design.X, design.Vn);
  minv += prior.precision;
  CholeskyFactor chol(minv);
  if (!chol.positive_definite())
    throw RankError("posterior_update: posterior precision is singular (vague prior with "
                    "rank-deficient design)");

  const Vector vinv_y = design.Vn.apply_inverse(y);
  Vector m = prior.precision.matvec(prior.mu);
  const Vector xty = detail::xt_apply(design.X, vinv_y);
  for (int j = 0; j < p; ++j) m[j] += xty[j];

  Vector mean = chol.solve(m);
  double a_star = std::numeric_limits<double>::quiet_NaN();
  double b_star = std::numeric_limits<double>::quiet_NaN();
  const bool has_ig = prior.ig.has_value();
  if (has_ig) {
    a_star = prior.ig->shape + 0.5 * design.X.rows();
    const double fit = dot(y, vinv_y) - dot(m, mean);
    b_star = prior.ig->scale + 0.5 * (prior.precision.quad(prior.mu) + fit);
  }
  return Posterior{chol.inverse(), std::move(m), std::move(mean), std::move(chol),
                   a_star, b_star, has_ig};
}

/// Decision rule for H: u'b > C with known sigma. True iff the posterior
/// tail mass below C is strictly under alpha, i.e. the standardized
/// statistic falls strictly below the alpha quantile. Exact ties reject H.
inline bool decide_known_var(const Posterior& post, const Hypothesis& hyp, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("decide_known_var: sigma must be positive");
  const double unit_var = post.contrast_unit_variance(hyp.u);
  if (!(unit_var > 0.0)) throw NumericError("decide_known_var: u'Mu must be positive");
  const double t = (hyp.C - post.contrast_mean(hyp.u)) / (sigma * std::sqrt(unit_var));
  return t < std_normal_quantile(hyp.alpha);
}

/// Decision rule for unknown sigma: J joint posterior draws of
/// (sigma^2, b); favor H when the fraction of draws with u'b <= C is at
/// most alpha.
inline bool decide_unknown_var(const Posterior& post, const Hypothesis& hyp, int J,
                               RngStream& rng) {
  if (J < 1) throw DomainError("decide_unknown_var: J must be at least 1");
  if (!post.has_ig)
    throw ConfigError("decide_unknown_var: posterior carries no inverse-gamma parameters");
  // u'b for b = mean + sigma L^{-T} z reduces to mean'u + sigma (L^{-1}u)'z.
  const Vector v = post.chol_precision.solve_lower(hyp.u);
  const double center = post.contrast_mean(hyp.u);
  const std::size_t p = hyp.u.size();
  int below = 0;
  for (int j = 0; j < J; ++j) {
    const double sigma2 = sample_inverse_gamma(post.a_star, post.b_star, rng);
    double proj = 0.0;
    for (std::size_t i = 0; i < p; ++i) proj += v[i] * rng.normal();
    const double contrast = center + std::sqrt(sigma2) * proj;
    if (contrast <= hyp.C) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(J) <= hyp.alpha;
}

}  // namespace assure
