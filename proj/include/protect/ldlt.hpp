#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <utility>

#include "protect/matrix.hpp"

namespace protect {

/// det = sign * exp(log_abs); sign == 0 for an exactly singular pivot.
template <std::floating_point Real = double>
struct DeterminantSign {
  int sign;
  Real log_abs;
};

namespace detail {

template <std::floating_point Real>
void symmetric_swap(DenseMatrix<Real>& w, std::size_t a, std::size_t b) {
  if (a == b) return;
  const std::size_t n = w.rows();
  for (std::size_t j = 0; j < n; ++j) std::swap(w(a, j), w(b, j));
  for (std::size_t i = 0; i < n; ++i) std::swap(w(i, a), w(i, b));
}

}  // namespace detail

/// Determinant of a symmetric matrix through a Bunch-Kaufman LDL^T
/// factorization (1x1 and 2x2 pivots, symmetric row/column interchanges).
/// Symmetric interchanges leave the determinant unchanged, so
/// det = prod det(D_k).
template <std::floating_point Real>
DeterminantSign<Real> symmetric_determinant(const SymmetricMatrix<Real>& m) {
  const Real alpha = (Real{1} + std::sqrt(Real{17})) / Real{8};
  const std::size_t n = m.size();
  DenseMatrix<Real> w = m.dense();
  int sign = 1;
  Real log_abs{0};

  auto absorb = [&](Real pivot_det) {
    if (pivot_det < Real{0}) sign = -sign;
    log_abs += std::log(std::abs(pivot_det));
  };

  std::size_t k = 0;
  while (k < n) {
    const Real akk = std::abs(w(k, k));
    Real colmax{0};
    std::size_t r = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        r = i;
      }
    if (akk == Real{0} && colmax == Real{0}) return {0, -std::numeric_limits<Real>::infinity()};

    bool two_by_two = false;
    if (akk < alpha * colmax) {
      Real rowmax{0};
      for (std::size_t j = k; j < n; ++j)
        if (j != r) rowmax = std::max(rowmax, std::abs(w(r, j)));
      if (akk * rowmax >= alpha * colmax * colmax) {
        // keep k as a 1x1 pivot
      } else if (std::abs(w(r, r)) >= alpha * rowmax) {
        detail::symmetric_swap(w, k, r);
      } else {
        detail::symmetric_swap(w, k + 1, r);
        two_by_two = true;
      }
    }

    if (!two_by_two) {
      const Real d = w(k, k);
      absorb(d);
      for (std::size_t i = k + 1; i < n; ++i) {
        const Real l = w(i, k) / d;
        for (std::size_t j = k + 1; j < n; ++j) w(i, j) -= l * w(k, j);
      }
      k += 1;
    } else {
      const Real a = w(k, k);
      const Real b = w(k, k + 1);
      const Real c = w(k + 1, k + 1);
      const Real det = a * c - b * b;
      if (det == Real{0}) return {0, -std::numeric_limits<Real>::infinity()};
      absorb(det);
      // Schur complement: W_tt -= C D^{-1} C^T with D^{-1} = [[c, -b], [-b, a]] / det
      for (std::size_t i = k + 2; i < n; ++i) {
        const Real ci0 = w(i, k);
        const Real ci1 = w(i, k + 1);
        const Real u0 = (c * ci0 - b * ci1) / det;
        const Real u1 = (a * ci1 - b * ci0) / det;
        for (std::size_t j = k + 2; j < n; ++j) w(i, j) -= u0 * w(k, j) + u1 * w(k + 1, j);
      }
      k += 2;
    }
  }
  return {sign, log_abs};
}

}  // namespace protect
