#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "protect/errors.hpp"
#include "protect/flow.hpp"
#include "protect/herglotz.hpp"
#include "protect/ldlt.hpp"
#include "protect/matrix.hpp"
#include "protect/protection.hpp"
#include "protect/spectral.hpp"

namespace protect {

/// A pair (A, B) whose protected set is exactly a prescribed finite set P.
///
/// With K = diag(P) and a unit vector v with all entries positive,
///
///     A = [[K, v], [v^T, 0]],   B = diag(0, ..., 0, 1).
///
/// For p in P the kernel equations (K - p) x + alpha v = 0,
/// v^T x + (t - p) alpha = 0 force alpha = 0 (the p-component of v is
/// non-zero) and then x = 0, so p is never an eigenvalue of A + tB. For
/// lambda outside P the Schur complement of the K block gives
///
///     det(A + tB - lambda) = det(K - lambda) * ((t - lambda) - v^T (K - lambda)^{-1} v),
///
/// which vanishes at t* = lambda + sum_k v_k^2 / (p_k - lambda) (see solve_t).
template <std::floating_point Real = double>
struct RealizedPair {
  std::vector<Real> points;   // P, strictly increasing
  std::vector<Real> weights;  // v in the eigenbasis of K, all > 0, ||v|| = 1
  SymmetricMatrix<Real> a;
  SymmetricMatrix<Real> b;
};

namespace detail {

template <std::floating_point Real>
void require_distinct_sorted(std::span<const Real> values, const char* what) {
  Real scale{1};
  for (Real x : values) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + " must be finite");
    scale = std::max(scale, std::abs(x));
  }
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] - values[i - 1] <= Real(1e-12) * scale)
      throw InvalidArgument(std::string(what) + " contain duplicate entries (" + std::to_string(values[i]) + ")");
}

}  // namespace detail

template <std::floating_point Real>
RealizedPair<Real> realize(std::span<const Real> points, std::optional<std::span<const Real>> weights = std::nullopt) {
  const std::size_t m = points.size();
  if (m == 0) throw InvalidArgument("the prescribed set must contain at least one point");
  std::vector<Real> w(m, Real{1});
  if (weights) {
    if (weights->size() != m) throw InvalidArgument("one weight per point is required");
    for (std::size_t k = 0; k < m; ++k) {
      if (!((*weights)[k] > Real{0}) || !std::isfinite((*weights)[k]))
        throw InvalidArgument("weights must be strictly positive");
      w[k] = (*weights)[k];
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });

  RealizedPair<Real> out{{}, {}, SymmetricMatrix<Real>::zero(1), SymmetricMatrix<Real>::zero(1)};
  for (std::size_t k : order) {
    out.points.push_back(points[k]);
    out.weights.push_back(w[k]);
  }
  detail::require_distinct_sorted<Real>(out.points, "points");
  const Real wn = norm<Real>(out.weights);
  for (Real& x : out.weights) x /= wn;

  const std::size_t n = m + 1;
  std::vector<Real> entries(n * n, Real{0});
  for (std::size_t k = 0; k < m; ++k) {
    entries[k * n + k] = out.points[k];
    entries[k * n + m] = out.weights[k];
    entries[m * n + k] = out.weights[k];
  }
  out.a = SymmetricMatrix<Real>(n, std::move(entries));
  std::vector<Real> bdiag(n, Real{0});
  bdiag[m] = Real{1};
  out.b = SymmetricMatrix<Real>::diagonal(bdiag);
  return out;
}

inline constexpr double kSolveTPointTolerance = 1e-10;

/// The unique t with lambda in spec(A + tB): t* = lambda + sum_k v_k^2 / (p_k - lambda).
/// Throws PoleError for lambda in P, where no such t exists.
template <std::floating_point Real>
Real solve_t(const RealizedPair<Real>& r, Real lambda) {
  const Real scale = source_scale(r.a);
  Real t = lambda;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const Real gap = r.points[k] - lambda;
    if (std::abs(gap) <= static_cast<Real>(kSolveTPointTolerance) * scale)
      throw PoleError(static_cast<double>(lambda), static_cast<double>(r.points[k]));
    t += r.weights[k] * r.weights[k] / gap;
  }
  return t;
}

/// A = diag(mu), B = y y^T with a unit vector y with no zero entry.
template <std::floating_point Real = double>
struct PolePair {
  std::vector<Real> mu;  // ascending
  std::vector<Real> y;
  SymmetricMatrix<Real> a;
  SymmetricMatrix<Real> b;
};

template <std::floating_point Real = double>
struct PoleConstruction {
  PolePair<Real> pair;
  std::vector<ProtectedPoint<Real>> points;  // one per gap (mu_k, mu_{k+1}), ascending
};

/// Rank-one construction: the protected points of (diag(mu), y y^T) are the
/// roots of f(lambda) = sum_k y_k^2 / (mu_k - lambda), one in every gap
/// between consecutive mu. mu may be given in any order; it is sorted
/// together with y.
template <std::floating_point Real>
PoleConstruction<Real> realize_via_poles(std::span<const Real> mu, std::optional<std::span<const Real>> y = std::nullopt) {
  const std::size_t m = mu.size();
  if (m < 2) throw InvalidArgument("the pole construction needs at least two poles");
  std::vector<Real> yy(m, Real{1});
  if (y) {
    if (y->size() != m) throw InvalidArgument("one probe entry per pole is required");
    for (std::size_t k = 0; k < m; ++k) {
      if ((*y)[k] == Real{0}) throw InvalidArgument("every entry of y must be non-zero");
      if (!std::isfinite((*y)[k])) throw InvalidArgument("entries of y must be finite");
      yy[k] = (*y)[k];
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return mu[i] < mu[j]; });

  PoleConstruction<Real> out{{{}, {}, SymmetricMatrix<Real>::zero(1), SymmetricMatrix<Real>::zero(1)}, {}};
  auto& pp = out.pair;
  for (std::size_t k : order) {
    pp.mu.push_back(mu[k]);
    pp.y.push_back(yy[k]);
  }
  detail::require_distinct_sorted<Real>(pp.mu, "poles");
  const Real yn = norm<Real>(pp.y);
  for (Real& x : pp.y) x /= yn;
  pp.a = SymmetricMatrix<Real>::diagonal(pp.mu);
  pp.b = SymmetricMatrix<Real>::outer(pp.y);

  HerglotzScalar<Real> h;
  h.poles = pp.mu;
  for (Real x : pp.y) h.weights.push_back(x * x);

  const PerturbationPair<Real> pair(pp.a, pp.b);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const SpectralGap<Real> g{pp.mu[k], pp.mu[k + 1], SpectralGap<Real>::Kind::bounded};
    const auto root = gap_root(h, g);
    if (!root) throw Error("no root found between poles " + std::to_string(pp.mu[k]) + " and " +
                           std::to_string(pp.mu[k + 1]));
    out.points.push_back({*root, protection_residual(pair, *root), g});
  }
  return out;
}

inline constexpr double kPencilRootRelativeWidth = 1e-12;

/// Real roots of d(mu) = det(A - mu B) detected as sign changes of d on the
/// given ascending grid (plus exact zeros at grid points) and refined by
/// bisection. Roots of even multiplicity that touch zero without a sign
/// change between grid points are not found.
template <std::floating_point Real>
std::vector<Real> pencil_roots_on_grid(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b,
                                       std::span<const Real> grid) {
  if (a.size() != b.size()) throw InvalidArgument("A and B must have the same dimension");
  auto sign_at = [&](Real mu) { return symmetric_determinant(a - mu * b).sign; };
  std::vector<Real> roots;
  std::vector<int> signs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    signs[i] = sign_at(grid[i]);
    if (signs[i] == 0) roots.push_back(grid[i]);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (signs[i] == 0 || signs[i + 1] == 0 || signs[i] == signs[i + 1]) continue;
    Real lo = grid[i];
    Real hi = grid[i + 1];
    const int s_lo = signs[i];
    for (int it = 0; it < 200; ++it) {
      const Real mid = lo + (hi - lo) / Real{2};
      if (hi - lo <= static_cast<Real>(kPencilRootRelativeWidth) * std::max(Real{1}, std::abs(mid))) break;
      const int s = sign_at(mid);
      if (s == 0) {
        lo = hi = mid;
        break;
      }
      if (s == s_lo)
        lo = mid;
      else
        hi = mid;
    }
    roots.push_back(lo + (hi - lo) / Real{2});
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Sign-change roots of det(A - mu B) on [lo, hi] sampled at `resolution` points.
template <std::floating_point Real>
std::vector<Real> pencil_spectrum(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b, Real lo, Real hi,
                                  std::size_t resolution) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("pencil search interval must be finite");
  const auto grid = linear_grid(lo, hi, resolution);
  return pencil_roots_on_grid<Real>(a, b, grid);
}

inline constexpr std::size_t kDefaultPencilResolution = 64;

/// Searches [-max_abs, max_abs] in decade chunks: [-min_abs, min_abs] and
/// +-[10^e, 10^(e+1)], each sampled at `resolution` points.
template <std::floating_point Real>
std::vector<Real> pencil_spectrum_log_chunked(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b,
                                              Real max_abs, std::size_t resolution = kDefaultPencilResolution,
                                              Real min_abs = Real(1e-3)) {
  if (!(min_abs > Real{0}) || !(max_abs > min_abs)) throw InvalidArgument("need 0 < min_abs < max_abs");
  if (resolution < 2) throw InvalidArgument("pencil resolution must be at least 2");
  std::vector<Real> grid = linear_grid(-min_abs, min_abs, resolution);
  for (Real lo = min_abs; lo < max_abs; lo *= Real{10}) {
    const Real hi = std::min(lo * Real{10}, max_abs);
    for (Real x : linear_grid(lo, hi, resolution)) {
      grid.push_back(x);
      grid.push_back(-x);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return pencil_roots_on_grid<Real>(a, b, grid);
}

}  // namespace protect
