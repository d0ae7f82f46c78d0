#pragma once

// Small dense symmetric-matrix algebra for the fiber geometry.
//
// Every tensor lives in a frame where the reference metric is the identity,
// so det A, sqrt(det A) and the fourth root of det A are plain determinants
// of the stored matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "metgeo/error.hpp"

namespace metgeo {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_row_major(std::size_t n, std::span<const double> values) {
    detail::require(values.size() == n * n, ErrorKind::InvalidInput,
                    "row-major data does not have n*n entries");
    Matrix m(n);
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
  }

  std::size_t dim() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    detail::require(a.n_ == b.n_, ErrorKind::InvalidInput, "dimension mismatch in product");
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    detail::require(a.n_ == b.n_, ErrorKind::InvalidInput, "dimension mismatch in difference");
    Matrix c(a.n_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) c.data_[k] = a.data_[k] - b.data_[k];
    return c;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Symmetric bilinear form at a point. Storage is kept exactly symmetric.
class SymTensor {
 public:
  SymTensor() = default;
  explicit SymTensor(std::size_t n) : m_(n) {}

  static SymTensor identity(std::size_t n) { return SymTensor(Matrix::identity(n), Tag{}); }

  static SymTensor diagonal(std::span<const double> d) {
    SymTensor s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
    return s;
  }
  static SymTensor diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  /// Symmetric part (M + M^T)/2 of an arbitrary square matrix.
  static SymTensor symmetrize(const Matrix& m) {
    const std::size_t n = m.dim();
    Matrix s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s(i, i) = m(i, i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        s(i, j) = v;
        s(j, i) = v;
      }
    }
    return SymTensor(std::move(s), Tag{});
  }

  static SymTensor from_row_major(std::size_t n, std::span<const double> values) {
    return symmetrize(Matrix::from_row_major(n, values));
  }
  static SymTensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    Matrix m(n);
    std::size_t i = 0;
    for (const auto& row : rows) {
      detail::require(row.size() == n, ErrorKind::InvalidInput, "ragged matrix rows");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return symmetrize(m);
  }

  /// Largest |m(i,j) - m(j,i)|, for validating input before symmetrizing.
  static double asymmetry(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = i + 1; j < m.dim(); ++j)
        worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
  }

  std::size_t dim() const noexcept { return m_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& matrix() const noexcept { return m_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
    return t;
  }
  double max_abs() const { return m_.max_abs(); }
  double frobenius_sq() const {
    double s = 0.0;
    for (double v : m_.values()) s += v * v;
    return s;
  }
  bool all_finite() const {
    return std::all_of(m_.values().begin(), m_.values().end(),
                       [](double v) { return std::isfinite(v); });
  }
  bool is_zero() const {
    return std::all_of(m_.values().begin(), m_.values().end(),
                       [](double v) { return v == 0.0; });
  }

  SymTensor& operator+=(const SymTensor& o) { return axpy(1.0, o); }
  SymTensor& operator-=(const SymTensor& o) { return axpy(-1.0, o); }
  SymTensor& operator*=(double c) {
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) m_(i, j) *= c;
    return *this;
  }
  /// this += c * o
  SymTensor& axpy(double c, const SymTensor& o) {
    detail::require(dim() == o.dim(), ErrorKind::InvalidInput, "dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) m_(i, j) += c * o.m_(i, j);
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double c, SymTensor a) { return a *= c; }
  friend bool operator==(const SymTensor& a, const SymTensor& b) {
    return a.dim() == b.dim() &&
           std::equal(a.m_.values().begin(), a.m_.values().end(), b.m_.values().begin());
  }

 private:
  struct Tag {};
  SymTensor(Matrix m, Tag) : m_(std::move(m)) {}
  Matrix m_;
};

/// x * s * x^T, returned exactly symmetric.
inline SymTensor congruence(const Matrix& x, const SymTensor& s) {
  return SymTensor::symmetrize(x * s.matrix() * x.transpose());
}

/// Frobenius inner product sum_ij a_ij b_ij.
inline double frobenius_dot(const SymTensor& a, const SymTensor& b) {
  detail::require(a.dim() == b.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  const auto av = a.matrix().values();
  const auto bv = b.matrix().values();
  return std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// Eigendecomposition

struct EigenSystem {
  std::vector<double> eigenvalues;  // descending
  Matrix frame;                     // columns are eigenvectors

  std::size_t dim() const noexcept { return eigenvalues.size(); }
};

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// norm falls below 1e-14 of the initial norm, or after 64 sweeps.
inline EigenSystem sym_eigen(const SymTensor& s) {
  detail::require(s.all_finite(), ErrorKind::InvalidInput, "non-finite tensor entries");
  const std::size_t n = s.dim();
  Matrix a = s.matrix();
  Matrix v = Matrix::identity(n);

  auto off_norm_sq = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) sum += 2.0 * a(i, j) * a(i, j);
    return sum;
  };
  const double initial = std::sqrt(s.frobenius_sq());
  const double stop = 1e-14 * initial;

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (std::sqrt(off_norm_sq()) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigenSystem es{std::vector<double>(n), Matrix(n)};
  for (std::size_t c = 0; c < n; ++c) {
    es.eigenvalues[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) es.frame(r, c) = v(r, order[c]);
  }
  return es;
}

/// frame * diag(f(lambda)) * frame^T
template <typename F>
SymTensor apply_spectral(const EigenSystem& es, F&& f) {
  const std::size_t n = es.dim();
  std::vector<double> fl(n);
  for (std::size_t k = 0; k < n; ++k) fl[k] = f(es.eigenvalues[k]);
  SymTensor out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += es.frame(i, k) * fl[k] * es.frame(j, k);
      out.set(i, j, sum);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Positive-definite tensors

/// Smallest eigenvalue must exceed this fraction of the largest.
inline constexpr double kDefaultPositivityTolerance = 1e-12;

inline bool is_positive_definite(const EigenSystem& es,
                                 double tol = kDefaultPositivityTolerance) {
  if (es.dim() == 0) return false;
  const double hi = es.eigenvalues.front();
  const double lo = es.eigenvalues.back();
  return hi > 0.0 && std::isfinite(hi) && lo > tol * hi;
}

class SpdTensor {
 public:
  SpdTensor() = default;

  /// Throws NotPositiveDefinite unless min eigenvalue > tol * max eigenvalue.
  static SpdTensor make(SymTensor s, double tol = kDefaultPositivityTolerance) {
    if (!is_positive_definite(sym_eigen(s), tol))
      detail::fail(ErrorKind::NotPositiveDefinite, "tensor is not positive definite");
    return SpdTensor(std::move(s));
  }
  static SpdTensor identity(std::size_t n) { return SpdTensor(SymTensor::identity(n)); }

  /// Wraps a tensor already known to be positive definite (no check).
  static SpdTensor trusted(SymTensor s) { return SpdTensor(std::move(s)); }

  const SymTensor& tensor() const noexcept { return s_; }
  std::size_t dim() const noexcept { return s_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return s_(i, j); }

  SpdTensor scaled(double c) const {
    detail::require(c > 0.0, ErrorKind::InvalidInput, "scale must be positive");
    return SpdTensor(c * s_);
  }

 private:
  explicit SpdTensor(SymTensor s) : s_(std::move(s)) {}
  SymTensor s_;
};

inline SpdTensor sym_exp(const SymTensor& s) {
  return SpdTensor::trusted(apply_spectral(sym_eigen(s), [](double l) { return std::exp(l); }));
}

namespace detail {
inline EigenSystem checked_eigen(const SpdTensor& p) {
  EigenSystem es = sym_eigen(p.tensor());
  if (!is_positive_definite(es))
    fail(ErrorKind::NotPositiveDefinite, "argument is not positive definite");
  return es;
}
}  // namespace detail

/// Refuses near-singular input rather than regularizing it.
inline SymTensor spd_log(const SpdTensor& p) {
  return apply_spectral(detail::checked_eigen(p), [](double l) { return std::log(l); });
}

inline SpdTensor spd_sqrt(const SpdTensor& p) {
  return SpdTensor::trusted(
      apply_spectral(detail::checked_eigen(p), [](double l) { return std::sqrt(l); }));
}

inline SpdTensor spd_pow(const SpdTensor& p, double exponent) {
  return SpdTensor::trusted(apply_spectral(
      detail::checked_eigen(p), [exponent](double l) { return std::pow(l, exponent); }));
}

inline SpdTensor spd_inverse(const SpdTensor& p) { return spd_pow(p, -1.0); }

/// det A computed from the spectrum.
inline double det(const SpdTensor& p) {
  const EigenSystem es = sym_eigen(p.tensor());
  double d = 1.0;
  for (double l : es.eigenvalues) d *= l;
  return d;
}

/// Fourth root of det A (the quantity written as the fourth root of A).
inline double fourth_root_det(const SpdTensor& p) {
  const EigenSystem es = sym_eigen(p.tensor());
  double log_det = 0.0;
  for (double l : es.eigenvalues) log_det += std::log(l);
  return std::exp(0.25 * log_det);
}

/// tr_a(bc) = tr(a^-1 b a^-1 c).
inline double trace_pair(const SpdTensor& a, const SymTensor& b, const SymTensor& c) {
  detail::require(a.dim() == b.dim() && a.dim() == c.dim(), ErrorKind::InvalidInput,
                  "dimension mismatch in trace_pair");
  const SpdTensor inv_sqrt = spd_pow(a, -0.5);
  const SymTensor bw = congruence(inv_sqrt.tensor().matrix(), b);
  const SymTensor cw = congruence(inv_sqrt.tensor().matrix(), c);
  return frobenius_dot(bw, cw);
}

/// <b,c>_a = tr_a(bc) * sqrt(det A).
inline double fiber_inner(const SpdTensor& a, const SymTensor& b, const SymTensor& c) {
  return trace_pair(a, b, c) * std::sqrt(det(a));
}

struct TracelessSplit {
  double trace = 0.0;  // tr_{a0} b
  SymTensor traceless;  // b - (trace/n) a0
};

inline TracelessSplit traceless_split(const SpdTensor& a0, const SymTensor& b) {
  detail::require(a0.dim() == b.dim(), ErrorKind::InvalidInput,
                  "dimension mismatch in traceless_split");
  const SpdTensor inv = spd_inverse(a0);
  const double tr = frobenius_dot(inv.tensor(), b);  // tr(a0^-1 b), both symmetric
  SymTensor bt = b;
  bt.axpy(-tr / static_cast<double>(b.dim()), a0.tensor());
  return {tr, std::move(bt)};
}

}  // namespace metgeo
