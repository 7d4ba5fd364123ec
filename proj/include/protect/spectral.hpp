#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "protect/errors.hpp"
#include "protect/matrix.hpp"

namespace protect {

/// Eigenvalues in ascending order together with an orthonormal frame whose
/// k-th column is the eigenvector of eigenvalues[k].
template <std::floating_point Real = double>
struct SpectralDecomposition {
  Vector<Real> eigenvalues;
  DenseMatrix<Real> frame;
  Real source_scale{1};

  std::size_t size() const noexcept { return eigenvalues.size(); }
  Vector<Real> eigenvector(std::size_t k) const { return frame.column(k); }

  /// frame * diag(eigenvalues) * frame^T
  DenseMatrix<Real> reconstruct() const {
    const std::size_t n = size();
    DenseMatrix<Real> m(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const Real s = frame(i, k) * eigenvalues[k];
        for (std::size_t j = 0; j < n; ++j) m(i, j) += s * frame(j, k);
      }
    return m;
  }
};

struct JacobiOptions {
  double relative_tolerance = 1e-14;
  int max_sweeps = 60;
};

namespace detail {

template <std::floating_point Real>
Real off_diagonal_mass(const DenseMatrix<Real>& w) {
  Real s{0};
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      if (i != j) s += w(i, j) * w(i, j);
  return std::sqrt(s);
}

// One Jacobi rotation annihilating w(p, q); accumulates into v.
template <std::floating_point Real>
void jacobi_rotate(DenseMatrix<Real>& w, DenseMatrix<Real>& v, std::size_t p, std::size_t q) {
  const Real apq = w(p, q);
  if (apq == Real{0}) return;
  const Real theta = (w(q, q) - w(p, p)) / (Real{2} * apq);
  Real t;
  if (std::abs(theta) > Real(1e150)) {
    t = Real{1} / (Real{2} * theta);
  } else {
    t = Real{1} / (std::abs(theta) + std::sqrt(theta * theta + Real{1}));
    if (theta < Real{0}) t = -t;
  }
  const Real c = Real{1} / std::sqrt(t * t + Real{1});
  const Real s = t * c;
  const std::size_t n = w.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const Real wkp = w(k, p);
    const Real wkq = w(k, q);
    w(k, p) = w(p, k) = c * wkp - s * wkq;
    w(k, q) = w(q, k) = s * wkp + c * wkq;
  }
  w(p, p) -= t * apq;
  w(q, q) += t * apq;
  w(p, q) = w(q, p) = Real{0};
  for (std::size_t k = 0; k < n; ++k) {
    const Real vkp = v(k, p);
    const Real vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace detail

/// Cyclic Jacobi eigensolver (row-major sweep order).
///
/// Converged once the off-diagonal Frobenius mass drops to
/// relative_tolerance * max(1, ||A||_F). Output is deterministic: eigenvalues
/// ascending (stable with respect to the diagonal position they converged
/// at) and each eigenvector's first non-negligible component is positive.
template <std::floating_point Real>
SpectralDecomposition<Real> eigh(const SymmetricMatrix<Real>& a, JacobiOptions options = {}) {
  const std::size_t n = a.size();
  const Real scale = source_scale(a);
  const Real threshold = static_cast<Real>(options.relative_tolerance) * scale;

  DenseMatrix<Real> w = a.dense();
  DenseMatrix<Real> v = DenseMatrix<Real>::identity(n);
  Real off = detail::off_diagonal_mass(w);
  for (int sweep = 0; sweep < options.max_sweeps && off > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(w, v, p, q);
    off = detail::off_diagonal_mass(w);
  }
  if (off > threshold) throw NonConvergence(static_cast<double>(off));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return w(i, i) < w(j, j); });

  SpectralDecomposition<Real> d;
  d.eigenvalues.resize(n);
  d.frame = DenseMatrix<Real>(n, n);
  d.source_scale = scale;
  const Real negligible = Real{64} * std::numeric_limits<Real>::epsilon();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    d.eigenvalues[k] = w(src, src);
    Real sign{1};
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > negligible) {
        sign = v(i, src) < Real{0} ? Real{-1} : Real{1};
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) d.frame(i, k) = sign * v(i, src);
  }
  return d;
}

template <std::floating_point Real>
Real dist_to_spectrum(const SpectralDecomposition<Real>& d, Real lambda) {
  Real best = std::numeric_limits<Real>::infinity();
  for (Real mu : d.eigenvalues) best = std::min(best, std::abs(mu - lambda));
  return best;
}

template <std::floating_point Real>
Real nearest_eigenvalue(const SpectralDecomposition<Real>& d, Real lambda) {
  Real best = d.eigenvalues.front();
  for (Real mu : d.eigenvalues)
    if (std::abs(mu - lambda) < std::abs(best - lambda)) best = mu;
  return best;
}

/// Relative distance below which a point counts as sitting on the spectrum.
inline constexpr double kPoleTolerance = 1e-12;

/// Throws PoleError when lambda is within kPoleTolerance * scale of spec(A).
template <std::floating_point Real>
void require_off_spectrum(const SpectralDecomposition<Real>& d, Real lambda) {
  if (dist_to_spectrum(d, lambda) <= static_cast<Real>(kPoleTolerance) * d.source_scale)
    throw PoleError(static_cast<double>(lambda), static_cast<double>(nearest_eigenvalue(d, lambda)));
}

/// Solves (A - lambda) x = y in the eigenbasis.
template <std::floating_point Real>
Vector<Real> resolvent_apply(const SpectralDecomposition<Real>& d, Real lambda, std::span<const Real> y) {
  require_off_spectrum(d, lambda);
  const std::size_t n = d.size();
  if (y.size() != n) throw InvalidArgument("resolvent_apply: vector length does not match the matrix");
  Vector<Real> x(n, Real{0});
  for (std::size_t k = 0; k < n; ++k) {
    Real c{0};
    for (std::size_t i = 0; i < n; ++i) c += d.frame(i, k) * y[i];
    c /= d.eigenvalues[k] - lambda;
    for (std::size_t i = 0; i < n; ++i) x[i] += c * d.frame(i, k);
  }
  return x;
}

/// (A - lambda)^{-1} as a symmetric matrix.
template <std::floating_point Real>
SymmetricMatrix<Real> resolvent_matrix(const SpectralDecomposition<Real>& d, Real lambda) {
  require_off_spectrum(d, lambda);
  const std::size_t n = d.size();
  std::vector<Real> entries(n * n, Real{0});
  for (std::size_t k = 0; k < n; ++k) {
    const Real inv = Real{1} / (d.eigenvalues[k] - lambda);
    for (std::size_t i = 0; i < n; ++i) {
      const Real s = d.frame(i, k) * inv;
      for (std::size_t j = 0; j < n; ++j) entries[i * n + j] += s * d.frame(j, k);
    }
  }
  return SymmetricMatrix<Real>(n, std::move(entries));
}

/// Applies a real function to the spectrum: frame * diag(fn(mu)) * frame^T.
template <std::floating_point Real, typename Fn>
SymmetricMatrix<Real> spectral_function(const SpectralDecomposition<Real>& d, Fn fn) {
  const std::size_t n = d.size();
  std::vector<Real> entries(n * n, Real{0});
  for (std::size_t k = 0; k < n; ++k) {
    const Real fk = fn(d.eigenvalues[k]);
    if (fk == Real{0}) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Real s = d.frame(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) entries[i * n + j] += s * d.frame(j, k);
    }
  }
  return SymmetricMatrix<Real>(n, std::move(entries));
}

inline constexpr double kPsdFloor = 1e-10;

/// Smallest eigenvalue of b, verified against the PSD floor
/// -kPsdFloor * max(1, ||b||_F). Throws NotPositiveSemidefinite below it.
template <std::floating_point Real>
Real require_psd(const SpectralDecomposition<Real>& d) {
  const Real lowest = d.eigenvalues.front();
  if (lowest < -static_cast<Real>(kPsdFloor) * d.source_scale)
    throw NotPositiveSemidefinite(static_cast<double>(lowest));
  return lowest;
}

/// Eigenvalues within the floor of zero, on either side, are taken as zero:
/// rounding noise of size eps would otherwise turn into sqrt(eps).
template <std::floating_point Real>
SymmetricMatrix<Real> psd_sqrt(const SpectralDecomposition<Real>& d) {
  require_psd(d);
  const Real floor = static_cast<Real>(kPsdFloor) * d.source_scale;
  return spectral_function(d, [floor](Real mu) { return mu > floor ? std::sqrt(mu) : Real{0}; });
}

template <std::floating_point Real>
SymmetricMatrix<Real> psd_sqrt(const SymmetricMatrix<Real>& b) {
  return psd_sqrt(eigh(b));
}

template <std::floating_point Real>
Real operator_norm(const SpectralDecomposition<Real>& d) {
  return std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
}

template <std::floating_point Real>
Real operator_norm(const SymmetricMatrix<Real>& m) {
  return operator_norm(eigh(m));
}

/// A maximal open interval of the real resolvent set.
template <std::floating_point Real = double>
struct SpectralGap {
  enum class Kind { bounded, left_unbounded, right_unbounded };

  Real lower;
  Real upper;
  Kind kind;

  bool bounded() const noexcept { return kind == Kind::bounded; }
  Real width() const noexcept { return upper - lower; }
  bool contains(Real x) const noexcept { return lower < x && x < upper; }

  friend bool operator==(const SpectralGap&, const SpectralGap&) = default;
};

/// Eigenvalues merged under a clustering tolerance; value is the cluster mean.
template <std::floating_point Real = double>
struct EigenCluster {
  Real value;
  std::size_t first;
  std::size_t count;
};

template <std::floating_point Real>
Real default_cluster_tolerance(const SpectralDecomposition<Real>& d) {
  return Real(1e-9) * d.source_scale;
}

/// Consecutive eigenvalues closer than cluster_tol (chained) form one cluster.
template <std::floating_point Real>
std::vector<EigenCluster<Real>> clusters(const SpectralDecomposition<Real>& d, Real cluster_tol) {
  if (!(cluster_tol > Real{0})) throw InvalidArgument("cluster tolerance must be positive");
  std::vector<EigenCluster<Real>> out;
  const auto& mu = d.eigenvalues;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= mu.size(); ++k) {
    if (k == mu.size() || mu[k] - mu[k - 1] > cluster_tol) {
      Real sum{0};
      for (std::size_t i = start; i < k; ++i) sum += mu[i];
      out.push_back({sum / static_cast<Real>(k - start), start, k - start});
      start = k;
    }
  }
  return out;
}

/// The two unbounded rays plus one bounded gap per pair of consecutive
/// distinct (clustered) eigenvalues, in increasing order.
template <std::floating_point Real>
std::vector<SpectralGap<Real>> gaps(const SpectralDecomposition<Real>& d, Real cluster_tol) {
  using Gap = SpectralGap<Real>;
  constexpr Real inf = std::numeric_limits<Real>::infinity();
  const auto cs = clusters(d, cluster_tol);
  std::vector<Gap> out;
  out.push_back({-inf, cs.front().value, Gap::Kind::left_unbounded});
  for (std::size_t k = 0; k + 1 < cs.size(); ++k) out.push_back({cs[k].value, cs[k + 1].value, Gap::Kind::bounded});
  out.push_back({cs.back().value, inf, Gap::Kind::right_unbounded});
  return out;
}

template <std::floating_point Real>
std::vector<SpectralGap<Real>> gaps(const SpectralDecomposition<Real>& d) {
  return gaps(d, default_cluster_tolerance(d));
}

}  // namespace protect
