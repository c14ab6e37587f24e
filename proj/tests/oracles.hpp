#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they are used to check.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

// erf by Maclaurin series (small arguments), long double arithmetic.
inline long double erf_series(long double z) {
  const long double two_over_sqrt_pi = 1.128379167095512573896L;
  long double term = z;
  long double sum = 0.0L;
  const long double z2 = z * z;
  for (int n = 0; n < 200; ++n) {
    const long double contrib = term / (2 * n + 1);
    sum += (n % 2 == 0) ? contrib : -contrib;
    term *= z2 / (n + 1);
    if (std::abs(term) < 1e-25L * std::abs(sum)) break;
  }
  return two_over_sqrt_pi * sum;
}

// erfc by the classical continued fraction (large arguments), modified
// Lentz evaluation.
inline long double erfc_cont_fraction(long double x) {
  const long double tiny = 1e-30L;
  long double f = x + tiny;
  long double c = f;
  long double d = 0.0L;
  for (int k = 1; k <= 300; ++k) {
    const long double a = 0.5L * k;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0L) < 1e-22L) break;
  }
  const long double inv_sqrt_pi = 0.564189583547756286948L;
  return inv_sqrt_pi * std::exp(-x * x) * (1.0L / f);
}

inline long double erfc_ref(long double x) {
  if (x < 0.0L) return 2.0L - erfc_ref(-x);
  if (x <= 1.5L) return 1.0L - erf_series(x);
  return erfc_cont_fraction(x);
}

inline long double normal_cdf_ref(long double x) {
  return 0.5L * erfc_ref(-x / 1.414213562373095048802L);
}

// Regularized incomplete beta via continued fraction.
inline long double betacf(long double a, long double b, long double x) {
  const long double tiny = 1e-30L;
  const long double qab = a + b, qap = a + 1.0L, qam = a - 1.0L;
  long double c = 1.0L;
  long double d = 1.0L - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0L / d;
  long double h = d;
  for (int m = 1; m <= 400; ++m) {
    const int m2 = 2 * m;
    long double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0L + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0L + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0L) < 1e-20L) break;
  }
  return h;
}

inline long double inc_beta(long double a, long double b, long double x) {
  if (x <= 0.0L) return 0.0L;
  if (x >= 1.0L) return 1.0L;
  const long double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const long double front = std::exp(lbeta + a * std::log(x) + b * std::log(1.0L - x));
  if (x < (a + 1.0L) / (a + b + 2.0L)) return front * betacf(a, b, x) / a;
  return 1.0L - front * betacf(b, a, 1.0L - x) / b;
}

// CDF of the Student-t distribution with df degrees of freedom.
inline long double student_t_cdf(long double t, long double df) {
  const long double x = df / (df + t * t);
  const long double tail = 0.5L * inc_beta(df / 2.0L, 0.5L, x);
  return t >= 0.0L ? 1.0L - tail : tail;
}

// Dense inverse by Gauss-Jordan elimination with partial pivoting.
inline std::vector<std::vector<long double>> dense_inverse(
    std::vector<std::vector<long double>> a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0.0L));
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0L) throw std::runtime_error("dense_inverse: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const long double scale = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] /= scale;
      inv[col][j] /= scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double factor = a[r][col];
      if (factor == 0.0L) continue;
      for (int j = 0; j < n; ++j) {
        a[r][j] -= factor * a[col][j];
        inv[r][j] -= factor * inv[col][j];
      }
    }
  }
  return inv;
}

inline long double log_binom_pmf(int n, int k, long double p) {
  return std::lgamma(static_cast<long double>(n + 1)) -
         std::lgamma(static_cast<long double>(k + 1)) -
         std::lgamma(static_cast<long double>(n - k + 1)) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

// Normal quantile by bisection on the reference CDF.
inline long double normal_quantile_ref(long double p) {
  long double lo = -42.0L, hi = 42.0L;
  for (int i = 0; i < 220; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (normal_cdf_ref(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

// Closed-form assurance for the two-arm cost-effectiveness design with the
// published priors and a weak analysis prior: the net-benefit estimate is
// Gaussian in both stages, so the favorable-decision probability is one
// Phi evaluation.
inline double costeff_closed_form(double K, double n, double sigma2, double tau2,
                                  double alpha = 0.025) {
  const long double xi = 1.5L * K - 1200.0L;              // u' mu_d
  const long double prior_var = 2.0L * K * K + 2.0e7L;    // u' V_d u
  const long double samp_var = 2.0L * (K * K * sigma2 + tau2) / n;
  const long double z = normal_quantile_ref(1.0L - static_cast<long double>(alpha));
  return static_cast<double>(normal_cdf_ref((xi - z * std::sqrt(samp_var)) /
                                            std::sqrt(prior_var + samp_var)));
}

}  // namespace oracles
