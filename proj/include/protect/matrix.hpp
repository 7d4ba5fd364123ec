#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "protect/errors.hpp"

namespace protect {

template <std::floating_point Real>
using Vector = std::vector<Real>;

template <std::floating_point Real>
Real dot(std::span<const Real> x, std::span<const Real> y) {
  Real s{0};
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

template <std::floating_point Real>
Real norm(std::span<const Real> x) {
  return std::sqrt(dot(x, x));
}

/// Row-major rectangular matrix. Used for eigenvector frames and for the
/// non-symmetric products (A^{-1}B and friends) that show up in the checks.
template <std::floating_point Real = double>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, Real fill = Real{0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Real{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Real operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Real> data() const noexcept { return data_; }

  Vector<Real> column(std::size_t j) const {
    Vector<Real> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vector<Real> apply(std::span<const Real> x) const {
    Vector<Real> y(rows_, Real{0});
    for (std::size_t i = 0; i < rows_; ++i) {
      Real s{0};
      for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  Real trace() const {
    Real s{0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("matrix product: inner dimensions differ");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Real aik = a(i, k);
        if (aik == Real{0}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend DenseMatrix operator*(Real s, DenseMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

 private:
  void check_same_shape(const DenseMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw InvalidArgument("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

template <std::floating_point Real>
Real frobenius(const DenseMatrix<Real>& m) {
  Real s{0};
  for (Real x : m.data()) s += x * x;
  return std::sqrt(s);
}

/// Dense real symmetric n x n matrix, stored row-major in full.
///
/// Construction validates |a_ij - a_ji| <= 1e-12 (1 + max |a_kl|) and then
/// replaces both entries by their mean, so the stored matrix is exactly
/// symmetric.
template <std::floating_point Real = double>
class SymmetricMatrix {
 public:
  static constexpr Real kSymmetryTolerance = Real(1e-12);

  SymmetricMatrix(std::size_t n, std::vector<Real> entries) : n_(n), data_(std::move(entries)) {
    if (n_ == 0) throw InvalidArgument("matrix dimension must be at least 1");
    if (data_.size() != n_ * n_)
      throw InvalidArgument("expected " + std::to_string(n_ * n_) + " entries, got " + std::to_string(data_.size()));
    Real max_abs{0};
    for (Real x : data_) {
      if (!std::isfinite(x)) throw InvalidArgument("matrix entries must be finite");
      max_abs = std::max(max_abs, std::abs(x));
    }
    const Real tol = kSymmetryTolerance * (Real{1} + max_abs);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const Real aij = data_[i * n_ + j];
        const Real aji = data_[j * n_ + i];
        if (std::abs(aij - aji) > tol) throw NotSymmetric(i, j, static_cast<double>(std::abs(aij - aji)));
        const Real mean = (aij + aji) / Real{2};
        data_[i * n_ + j] = mean;
        data_[j * n_ + i] = mean;
      }
  }

  static SymmetricMatrix from_rows(std::initializer_list<std::initializer_list<Real>> rows) {
    std::vector<Real> entries;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw InvalidArgument("from_rows: matrix must be square");
      entries.insert(entries.end(), r.begin(), r.end());
    }
    return SymmetricMatrix(rows.size(), std::move(entries));
  }

  static SymmetricMatrix from_dense(const DenseMatrix<Real>& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("from_dense: matrix must be square");
    return SymmetricMatrix(m.rows(), std::vector<Real>(m.data().begin(), m.data().end()));
  }

  static SymmetricMatrix zero(std::size_t n) { return SymmetricMatrix(n, std::vector<Real>(n * n, Real{0})); }

  static SymmetricMatrix identity(std::size_t n) { return diagonal(std::vector<Real>(n, Real{1})); }

  static SymmetricMatrix diagonal(std::span<const Real> d) {
    std::vector<Real> entries(d.size() * d.size(), Real{0});
    for (std::size_t i = 0; i < d.size(); ++i) entries[i * d.size() + i] = d[i];
    return SymmetricMatrix(d.size(), std::move(entries));
  }

  /// y y^T
  static SymmetricMatrix outer(std::span<const Real> y) {
    std::vector<Real> entries(y.size() * y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) entries[i * y.size() + j] = y[i] * y[j];
    return SymmetricMatrix(y.size(), std::move(entries));
  }

  std::size_t size() const noexcept { return n_; }
  Real operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const Real> entries() const noexcept { return data_; }

  DenseMatrix<Real> dense() const {
    DenseMatrix<Real> m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  Real max_abs() const {
    Real m{0};
    for (Real x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  Real trace() const {
    Real s{0};
    for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }

  /// A - shift * I
  SymmetricMatrix shifted(Real shift) const {
    SymmetricMatrix m = *this;
    for (std::size_t i = 0; i < n_; ++i) m.data_[i * n_ + i] -= shift;
    return m;
  }

  Vector<Real> apply(std::span<const Real> x) const {
    Vector<Real> y(n_, Real{0});
    for (std::size_t i = 0; i < n_; ++i) {
      Real s{0};
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) {
    a.check_same_size(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) {
    a.check_same_size(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend SymmetricMatrix operator*(Real s, SymmetricMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  void check_same_size(const SymmetricMatrix& b) const {
    if (n_ != b.n_) throw InvalidArgument("matrix dimensions differ");
  }

  std::size_t n_ = 0;
  std::vector<Real> data_;
};

template <std::floating_point Real>
Real frobenius(const SymmetricMatrix<Real>& m) {
  Real s{0};
  for (Real x : m.entries()) s += x * x;
  return std::sqrt(s);
}

/// max(1, ||m||_F): the reference scale for every relative tolerance.
template <std::floating_point Real>
Real source_scale(const SymmetricMatrix<Real>& m) {
  return std::max(Real{1}, frobenius(m));
}

/// Symmetrizes a product that is symmetric in exact arithmetic (e.g. B R B).
template <std::floating_point Real>
SymmetricMatrix<Real> symmetric_part(const DenseMatrix<Real>& m) {
  const std::size_t n = m.rows();
  std::vector<Real> entries(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = (m(i, j) + m(j, i)) / Real{2};
  return SymmetricMatrix<Real>(n, std::move(entries));
}

}  // namespace protect
