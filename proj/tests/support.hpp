#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <random>
#include <vector>

#include "protect/matrix.hpp"
#include "protect/realization.hpp"
#include "protect/spectral.hpp"

namespace protect::testing {

/// The 2x2 pair from the introductory example: A = diag(1, -1), B = (1/2)[[1,1],[1,1]].
inline SymmetricMatrix<double> example_a() { return SymmetricMatrix<double>::from_rows({{1, 0}, {0, -1}}); }
inline SymmetricMatrix<double> example_b() { return SymmetricMatrix<double>::from_rows({{0.5, 0.5}, {0.5, 0.5}}); }

/// Indefinite control: A = diag(1, -1), B = [[0,1],[1,0]].
inline SymmetricMatrix<double> indefinite_b() { return SymmetricMatrix<double>::from_rows({{0, 1}, {1, 0}}); }

/// Closed forms for the 2x2 example, from trace t and determinant -1.
inline double example_upper(double t) { return t / 2 + std::sqrt(t * t / 4 + 1); }
inline double example_lower(double t) { return t / 2 - std::sqrt(t * t / 4 + 1); }
inline double example_dist(double t) { return 1.0 / (std::abs(t) / 2 + std::sqrt(t * t / 4 + 1)); }

inline SymmetricMatrix<double> random_symmetric(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) e[i * n + j] = e[j * n + i] = g(rng);
  return SymmetricMatrix<double>(n, std::move(e));
}

/// Random PSD matrix C C^T with C of size n x rank.
inline SymmetricMatrix<double> random_psd(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix<double> c(n, rank);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < rank; ++j) c(i, j) = g(rng);
  return symmetric_part(c * c.transpose());
}

/// Haar-ish orthogonal matrix by modified Gram-Schmidt on a Gaussian matrix.
inline DenseMatrix<double> random_orthogonal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> cols(n, std::vector<double>(n));
  for (auto& c : cols)
    for (auto& x : c) x = g(rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0;
        for (std::size_t i = 0; i < n; ++i) d += cols[j][i] * cols[k][i];
        for (std::size_t i = 0; i < n; ++i) cols[j][i] -= d * cols[k][i];
      }
    double nn = 0;
    for (double x : cols[j]) nn += x * x;
    nn = std::sqrt(nn);
    for (double& x : cols[j]) x /= nn;
  }
  DenseMatrix<double> q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = cols[j][i];
  return q;
}

/// Q M Q^T
inline SymmetricMatrix<double> conjugate(const DenseMatrix<double>& q, const SymmetricMatrix<double>& m) {
  return symmetric_part(q * m.dense() * q.transpose());
}

/// Sorted distinct reals in [lo, hi] with pairwise separation >= min_sep.
inline std::vector<double> random_separated(std::mt19937_64& rng, std::size_t m, double lo, double hi, double min_sep) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out;
  while (out.size() < m) {
    const double x = u(rng);
    bool ok = true;
    for (double y : out) ok = ok && std::abs(x - y) >= min_sep;
    if (ok) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Determinant by Gaussian elimination with partial pivoting; independent of
/// the symmetric factorization under test.
inline double determinant_gepp(DenseMatrix<double> m) {
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (m(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
inline DenseMatrix<double> inverse_gepp(DenseMatrix<double> m) {
  const std::size_t n = m.rows();
  auto inv = DenseMatrix<double>::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(m(k, j), m(p, j));
      std::swap(inv(k, j), inv(p, j));
    }
    const double piv = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double l = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= l * m(k, j);
        inv(i, j) -= l * inv(k, j);
      }
    }
  }
  return inv;
}

/// ||B (A - l)^{-1} B||_F / (||B||_F^2 / dist), with the inverse from elimination.
inline double residual_oracle(const SymmetricMatrix<double>& a, const SymmetricMatrix<double>& b, double lambda) {
  const auto r = inverse_gepp(a.shifted(lambda).dense());
  const double nb = frobenius(b);
  return frobenius(b.dense() * r * b.dense()) / (nb * nb / dist_to_spectrum(eigh(a), lambda));
}

struct Instance {
  SymmetricMatrix<double> a;
  SymmetricMatrix<double> b;
  double lambda;
};

/// A realized pair with well separated points, rotated by a random orthogonal
/// matrix and rescaled, with lambda one of the prescribed points.
inline Instance protected_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);
  const std::size_t m = size(rng);
  const auto points = random_separated(rng, m, -4.0, 4.0, 0.5);
  std::vector<double> weights(m);
  for (double& x : weights) x = w(rng);
  const auto r = realize<double>(points, std::span<const double>(weights));
  const auto q = random_orthogonal(rng, m + 1);
  const double c = std::pow(10.0, log_scale(rng));
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  return {c * conjugate(q, r.a), c * conjugate(q, r.b), c * r.points[pick(rng)]};
}

/// Random A, random PSD B of random rank, lambda at the midpoint of a random
/// bounded gap of A.
inline Instance unprotected_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(2, 6);
  const std::size_t n = size(rng);
  std::uniform_int_distribution<std::size_t> rank(1, n);
  const auto a = random_symmetric(rng, n);
  const auto b = random_psd(rng, n, rank(rng));
  const auto gs = gaps(eigh(a));
  std::uniform_int_distribution<std::size_t> pick(1, gs.size() - 2);
  const auto& g = gs[pick(rng)];
  return {a, b, g.lower + g.width() / 2};
}

}  // namespace protect::testing
