#pragma once

// Small dense linear algebra for the model dimensions that occur here
// (p <= ~16 coefficients). Row-major storage, value semantics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "assure/errors.hpp"

namespace assure {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool is_square() const { return rows_ == cols_; }

  Vector matvec(const Vector& x) const {
    Vector y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  // x^T A x for square A.
  double quad(const Vector& x) const {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) {
      double row = 0.0;
      for (int j = 0; j < cols_; ++j) row += (*this)(i, j) * x[j];
      s += x[i] * row;
    }
    return s;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
  }

  Matrix& operator+=(const Matrix& other) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Lower-triangular Cholesky factor of a symmetric positive semidefinite
// matrix. Exact zero pivots are tolerated (rank-deficient but consistent
// columns); indefinite inputs trigger the jitter ladder: 1e-12*trace/dim
// added to the diagonal, escalating tenfold up to 1e-6*trace/dim.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& a) : dim_(a.rows()), l_(a.rows(), a.rows()) {
    if (!a.is_square()) throw DomainError("cholesky: matrix must be square");
    const double scale = std::max(a.trace() / std::max(dim_, 1), 0.0);
    double jitter = 0.0;
    if (try_factor(a, 0.0)) return;
    jitter = 1e-12 * scale;
    while (jitter <= 1e-6 * scale * (1.0 + 1e-12)) {
      if (try_factor(a, jitter)) {
        jitter_ = jitter;
        return;
      }
      jitter *= 10.0;
    }
    throw NumericError("cholesky: factorization failed after max jitter " +
                       std::to_string(1e-6 * scale));
  }

  int dim() const { return dim_; }
  const Matrix& lower() const { return l_; }
  double jitter() const { return jitter_; }
  bool positive_definite() const { return rank_ == dim_; }

  // y = L z
  Vector apply_lower(const Vector& z) const {
    Vector y(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j <= i; ++j) s += l_(i, j) * z[j];
      y[i] = s;
    }
    return y;
  }

  // Solves L z = b (forward substitution). Requires positive definite factor.
  Vector solve_lower(const Vector& b) const {
    require_pd("solve_lower");
    Vector z(dim_);
    for (int i = 0; i < dim_; ++i) {
      double s = b[i];
      for (int j = 0; j < i; ++j) s -= l_(i, j) * z[j];
      z[i] = s / l_(i, i);
    }
    return z;
  }

  // Solves L^T x = z (back substitution).
  Vector solve_upper(const Vector& z) const {
    require_pd("solve_upper");
    Vector x(dim_);
    for (int i = dim_ - 1; i >= 0; --i) {
      double s = z[i];
      for (int j = i + 1; j < dim_; ++j) s -= l_(j, i) * x[j];
      x[i] = s / l_(i, i);
    }
    return x;
  }

  // Solves (L L^T) x = b.
  Vector solve(const Vector& b) const { return solve_upper(solve_lower(b)); }

  // b^T (L L^T)^{-1} b, via one forward solve.
  double quad_inv(const Vector& b) const {
    const Vector z = solve_lower(b);
    return dot(z, z);
  }

  // Dense inverse of the factored matrix (dimensions here are small).
  Matrix inverse() const {
    require_pd("inverse");
    Matrix inv(dim_, dim_);
    Vector e(dim_, 0.0);
    for (int j = 0; j < dim_; ++j) {
      e[j] = 1.0;
      Vector col = solve(e);
      for (int i = 0; i < dim_; ++i) inv(i, j) = col[i];
      e[j] = 0.0;
    }
    // Symmetrize to wash out solve round-off.
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < i; ++j) {
        const double v = 0.5 * (inv(i, j) + inv(j, i));
        inv(i, j) = v;
        inv(j, i) = v;
      }
    return inv;
  }

 private:
  bool try_factor(const Matrix& a, double jitter) {
    rank_ = 0;
    const double scale = std::max(a.max_abs(), jitter);
    const double tol = scale * 1e-14 + 1e-300;
    for (int j = 0; j < dim_; ++j) {
      double d = a(j, j) + jitter;
      for (int k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (d < -tol) return false;
      if (d <= tol) {
        // Semi-definite pivot: column must be (numerically) null.
        l_(j, j) = 0.0;
        for (int i = j + 1; i < dim_; ++i) {
          double s = a(i, j);
          for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
          if (std::abs(s) > 1e3 * tol) return false;
          l_(i, j) = 0.0;
        }
        continue;
      }
      const double root = std::sqrt(d);
      l_(j, j) = root;
      ++rank_;
      for (int i = j + 1; i < dim_; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / root;
      }
    }
    return true;
  }

  void require_pd(const char* op) const {
    if (!positive_definite())
      throw RankError(std::string("cholesky: ") + op + " requires a positive definite matrix");
  }

  int dim_ = 0;
  int rank_ = 0;
  Matrix l_;
  double jitter_ = 0.0;
};

}  // namespace assure
