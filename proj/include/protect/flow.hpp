#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "protect/errors.hpp"
#include "protect/matrix.hpp"
#include "protect/spectral.hpp"

namespace protect {

/// Sorted eigenvalues of A + tB along a grid of t values.
template <std::floating_point Real = double>
struct FlowSample {
  std::vector<Real> t_values;
  std::vector<std::vector<Real>> branches;  // branches[i] = spec(A + t_i B), ascending

  /// max_i |sum(branches[i]) - (tr A + t_i tr B)| / max(1, ||A + t_i B||_F)
  Real trace_defect(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b) const {
    Real worst{0};
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      Real sum{0};
      for (Real x : branches[i]) sum += x;
      const Real expected = a.trace() + t_values[i] * b.trace();
      const Real scale = source_scale(a + t_values[i] * b);
      worst = std::max(worst, std::abs(sum - expected) / scale);
    }
    return worst;
  }
};

/// The t-sweep of A + tB. B need not be semi-definite here.
template <std::floating_point Real>
FlowSample<Real> spectral_flow(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b,
                               std::span<const Real> t_grid) {
  if (a.size() != b.size()) throw InvalidArgument("A and B must have the same dimension");
  if (t_grid.empty()) throw InvalidArgument("t grid must not be empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("t grid must be strictly increasing");
  FlowSample<Real> out;
  out.t_values.assign(t_grid.begin(), t_grid.end());
  out.branches.reserve(t_grid.size());
  for (Real t : t_grid) out.branches.push_back(eigh(a + t * b).eigenvalues);
  return out;
}

/// n equally spaced points from lo to hi inclusive.
template <std::floating_point Real>
std::vector<Real> linear_grid(Real lo, Real hi, std::size_t steps) {
  if (steps < 2) throw InvalidArgument("a linear grid needs at least 2 points");
  if (!(lo < hi)) throw InvalidArgument("a linear grid needs lo < hi");
  std::vector<Real> g(steps);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = lo + (hi - lo) * static_cast<Real>(i) / static_cast<Real>(steps - 1);
  g.back() = hi;
  return g;
}

/// 10^e for e = min_exp, min_exp + 1/per_decade, ..., max_exp; with
/// `symmetric` the negatives and 0 are added. Ascending.
template <std::floating_point Real>
std::vector<Real> log_grid(int min_exp, int max_exp, std::size_t per_decade, bool symmetric) {
  if (per_decade == 0) throw InvalidArgument("a log grid needs at least one point per decade");
  if (max_exp < min_exp) throw InvalidArgument("a log grid needs min_exp <= max_exp");
  const std::size_t count = static_cast<std::size_t>(max_exp - min_exp) * per_decade + 1;
  std::vector<Real> pos(count);
  for (std::size_t i = 0; i < count; ++i)
    pos[i] = std::pow(Real{10}, static_cast<Real>(min_exp) + static_cast<Real>(i) / static_cast<Real>(per_decade));
  if (!symmetric) return pos;
  std::vector<Real> g;
  g.reserve(2 * count + 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.push_back(-*it);
  g.push_back(Real{0});
  g.insert(g.end(), pos.begin(), pos.end());
  return g;
}

/// The oracle grid: symmetric, 25 points per decade, |t| in [1e-2, 1e6], plus 0.
template <std::floating_point Real = double>
std::vector<Real> standard_t_grid() {
  return log_grid<Real>(-2, 6, 25, true);
}

template <std::floating_point Real = double>
struct OracleResult {
  std::vector<std::size_t> never_hit;      // no eigenvalue within hit_tol at any grid t
  std::vector<std::size_t> never_crossed;  // eigenvalue count below lambda constant along the grid
  std::vector<Real> min_distance;          // min over t of dist(lambda, spec(A + tB))
  std::vector<std::optional<Real>> first_hit;
};

/// Brute-force sweep used as an independent check on protected_set.
///
/// A grid point lambda is hit when some grid t puts an eigenvalue of A + tB
/// within hit_tol of it. Independently, a branch crossing lambda between two
/// consecutive grid values shows up as a change in the number of eigenvalues
/// below lambda; `never_crossed` records the points where that count never
/// changes.
template <std::floating_point Real>
OracleResult<Real> brute_force_unprotected(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b,
                                           std::span<const Real> lambda_grid, std::span<const Real> t_grid,
                                           Real hit_tol) {
  if (lambda_grid.empty() || t_grid.empty()) throw InvalidArgument("oracle grids must not be empty");
  if (!(hit_tol > Real{0})) throw InvalidArgument("hit tolerance must be positive");
  if (a.size() != b.size()) throw InvalidArgument("A and B must have the same dimension");
  const std::size_t m = lambda_grid.size();
  std::vector<Real> min_dist(m, std::numeric_limits<Real>::infinity());
  std::vector<std::optional<Real>> first_hit(m);
  std::vector<bool> crossed(m, false);
  std::vector<std::ptrdiff_t> below_prev(m, -1);

  for (Real t : t_grid) {
    const auto spec = eigh(a + t * b).eigenvalues;
    for (std::size_t i = 0; i < m; ++i) {
      const Real lambda = lambda_grid[i];
      Real dist = std::numeric_limits<Real>::infinity();
      for (Real mu : spec) dist = std::min(dist, std::abs(mu - lambda));
      min_dist[i] = std::min(min_dist[i], dist);
      if (dist <= hit_tol && !first_hit[i]) first_hit[i] = t;
      const auto below = static_cast<std::ptrdiff_t>(std::lower_bound(spec.begin(), spec.end(), lambda) - spec.begin());
      if (below_prev[i] >= 0 && below != below_prev[i]) crossed[i] = true;
      below_prev[i] = below;
    }
  }

  OracleResult<Real> out;
  out.min_distance = std::move(min_dist);
  out.first_hit = std::move(first_hit);
  for (std::size_t i = 0; i < m; ++i) {
    if (!out.first_hit[i]) out.never_hit.push_back(i);
    if (!crossed[i]) out.never_crossed.push_back(i);
  }
  return out;
}

}  // namespace protect
