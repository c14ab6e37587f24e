#pragma once

// Deterministic statistical kernel: standard-normal CDF/quantile, a
// reproducible substream RNG, and the samplers the simulation engines
// consume. Everything is implemented in-repo so accuracy and bit-level
// reproducibility do not depend on the host libm or libstdc++ RNG.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "assure/errors.hpp"
#include "assure/linalg.hpp"

namespace assure {

namespace detail {

// erf/erfc rational approximations by W. J. Cody ("Rational Chebyshev
// approximation for the error function", Math. Comp. 23, 1969), as in
// netlib SPECFUN. Accurate to ~18 significant digits in exact arithmetic.
inline double erfc_cody(double x) {
  static const double a[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                              3209.37758913846947, 0.185777706184603153};
  static const double b[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                              2844.23683343917062};
  static const double c[9] = {0.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                              298.635138197400131,  881.95222124176909,  1712.04761263407058,
                              2051.07837782607147,  1230.33935479799725, 2.15311535474403846e-8};
  static const double d[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                              1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                              3439.36767414372164, 1230.33935480374942};
  static const double p[6] = {0.305326634961232344, 0.360344899949804439, 0.125781726111229246,
                              0.0160837851487422766, 6.58749161529837803e-4, 0.0163153871373020978};
  static const double q[5] = {2.56852019228982242, 1.87295284992346047, 0.527905102951428412,
                              0.0605183413124413191, 0.00233520497626869185};
  static const double sqrpi = 0.56418958354775628695;  // 1/sqrt(pi)

  const double y = std::abs(x);
  double result;
  if (y <= 0.46875) {
    const double ysq = y > 1.11e-16 ? y * y : 0.0;
    double xnum = a[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + a[i]) * ysq;
      xden = (xden + b[i]) * ysq;
    }
    return 1.0 - x * (xnum + a[3]) / (xden + b[3]);
  }
  if (y <= 4.0) {
    double xnum = c[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * y;
      xden = (xden + d[i]) * y;
    }
    result = (xnum + c[7]) / (xden + d[7]);
  } else if (y < 26.543) {
    const double ysq = 1.0 / (y * y);
    double xnum = p[5] * ysq;
    double xden = ysq;
    for (int i = 0; i < 4; ++i) {
      xnum = (xnum + p[i]) * ysq;
      xden = (xden + q[i]) * ysq;
    }
    result = ysq * (xnum + p[4]) / (xden + q[4]);
    result = (sqrpi - result) / y;
  } else {
    result = 0.0;
  }
  if (result != 0.0) {
    // exp(-y^2) split so the truncated square stays exactly representable.
    const double ytr = std::floor(y * 16.0) / 16.0;
    const double del = (y - ytr) * (y + ytr);
    result *= std::exp(-ytr * ytr) * std::exp(-del);
  }
  return x < 0.0 ? 2.0 - result : result;
}

// Initial rational approximation to the normal quantile (P. J. Acklam).
// Max relative error ~1.15e-9; polished by a Halley step against the CDF.
inline double acklam_quantile(double pr) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  static const double p_low = 0.02425;

  if (pr < p_low) {
    const double qq = std::sqrt(-2.0 * std::log(pr));
    return (((((c[0] * qq + c[1]) * qq + c[2]) * qq + c[3]) * qq + c[4]) * qq + c[5]) /
           ((((d[0] * qq + d[1]) * qq + d[2]) * qq + d[3]) * qq + 1.0);
  }
  if (pr <= 1.0 - p_low) {
    const double qq = pr - 0.5;
    const double r = qq * qq;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * qq /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double qq = std::sqrt(-2.0 * std::log(1.0 - pr));
  return -(((((c[0] * qq + c[1]) * qq + c[2]) * qq + c[3]) * qq + c[4]) * qq + c[5]) /
         ((((d[0] * qq + d[1]) * qq + d[2]) * qq + d[3]) * qq + 1.0);
}

}  // namespace detail

/// Standard normal CDF, absolute error well below 1e-12.
inline double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("std_normal_cdf: non-finite input");
  return 0.5 * detail::erfc_cody(-x / 1.4142135623730950488);
}

inline double std_normal_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

/// Standard normal quantile; satisfies |cdf(quantile(p)) - p| <= 1e-10.
inline double std_normal_quantile(double pr) {
  if (!(pr > 0.0 && pr < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0,1)");
  double x = detail::acklam_quantile(pr);
  // Work on the lower half so the CDF residual is well resolved.
  const bool upper = pr > 0.5;
  const double target = upper ? 1.0 - pr : pr;
  double y = upper ? -x : x;
  for (int it = 0; it < 2; ++it) {
    const double e = std_normal_cdf(y) - target;
    const double u = e * 2.5066282746310002 * std::exp(0.5 * y * y);
    if (!std::isfinite(u)) break;
    const double step = u / (1.0 + 0.5 * y * u);
    if (step == 0.0) break;
    y -= step;
  }
  return upper ? -y : y;
}

// ---------------------------------------------------------------------------
// Reproducible substreams
// ---------------------------------------------------------------------------

/// One independent random stream per (master_seed, stream_id) pair.
/// Stream states are derived split-style via SplitMix64 and iterated with
/// xoshiro256++, so replicate r always sees the same sequence no matter
/// which worker runs it.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t st = mix64(master_seed) ^ mix64(stream_id + 0x632BE59BD9B4E019ULL);
    for (auto& word : s_) {
      st += 0x9E3779B97F4A7C15ULL;
      word = mix64(st);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform draw on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw by inversion. Uses the unpolished rational
  /// approximation (relative error ~1e-9, far below Monte Carlo noise);
  /// std_normal_quantile adds the Halley step where the 1e-10 round-trip
  /// contract matters.
  double normal() { return detail::acklam_quantile(uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
};

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

inline Vector sample_mvn(const Vector& mean, const CholeskyFactor& chol, RngStream& rng) {
  Vector z(mean.size());
  for (auto& v : z) v = rng.normal();
  Vector y = chol.apply_lower(z);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += mean[i];
  return y;
}

/// Multivariate normal draw; `cov` must be symmetric PSD up to the
/// factorization jitter policy. A zero covariance returns the mean exactly.
inline Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng) {
  if (static_cast<int>(mean.size()) != cov.rows())
    throw DomainError("sample_mvn: mean/covariance dimensions differ");
  return sample_mvn(mean, CholeskyFactor(cov), rng);
}

/// Gamma(shape, scale 1) via Marsaglia-Tsang squeeze, with the usual
/// boost for shape < 1.
inline double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw DomainError("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double xx = x * x;
    if (u < 1.0 - 0.0331 * xx * xx) return d * v;
    if (std::log(u) < 0.5 * xx + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Inverse-gamma(shape a, scale b): reciprocal of a Gamma(a, rate b) draw.
inline double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw DomainError("sample_inverse_gamma: shape and scale must be positive");
  return scale / sample_gamma(shape, rng);
}

inline double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("sample_beta: parameters must be positive");
  const double x = sample_gamma(a, rng);
  const double y = sample_gamma(b, rng);
  return x / (x + y);
}

namespace detail {

inline int binomial_inversion(int n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double cdf = pmf;
  const double ratio = p / q;
  const double u = rng.uniform();
  int k = 0;
  while (u > cdf && k < n) {
    pmf *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
    cdf += pmf;
    ++k;
  }
  return k;
}

inline double stirling_tail(double k) {
  static const double table[10] = {0.0810614667953272,  0.0413406959554092,
                                   0.0276779256849983,  0.02079067210376509,
                                   0.0166446911898211,  0.0138761288230707,
                                   0.0118967099458917,  0.0104112652619720,
                                   0.00925546218271273, 0.00833056343336287};
  if (k <= 9.0) return table[static_cast<int>(k)];
  const double kp1sq = (k + 1.0) * (k + 1.0);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1.0);
}

// Transformed rejection with squeeze (Hormann's BTRS); requires p <= 0.5
// and n*p >= 10.
inline int binomial_btrs(int n, double p, RngStream& rng) {
  const double nd = static_cast<double>(n);
  const double spq = std::sqrt(nd * p * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1.0 - p);
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double m = std::floor((nd + 1.0) * p);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<int>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound = (m + 0.5) * std::log((m + 1.0) / (r * (nd - m + 1.0))) +
                         (nd + 1.0) * std::log((nd - m + 1.0) / (nd - k + 1.0)) +
                         (k + 0.5) * std::log(r * (nd - k + 1.0) / (k + 1.0)) +
                         stirling_tail(m) + stirling_tail(nd - m) - stirling_tail(k) -
                         stirling_tail(nd - k);
    if (v <= bound) return static_cast<int>(k);
  }
}

}  // namespace detail

/// Binomial(n, p): CDF inversion for small n or small mean, transformed
/// rejection otherwise.
inline int sample_binomial(int n, double p, RngStream& rng) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw DomainError("sample_binomial: invalid arguments");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double ps = flip ? 1.0 - p : p;
  int k;
  if (n < 64 || static_cast<double>(n) * ps < 30.0)
    k = detail::binomial_inversion(n, ps, rng);
  else
    k = detail::binomial_btrs(n, ps, rng);
  return flip ? n - k : k;
}

}  // namespace assure
