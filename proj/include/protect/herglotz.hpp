#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "protect/errors.hpp"
#include "protect/spectral.hpp"

namespace protect {

/// f(lambda) = sum_k weights[k] / (poles[k] - lambda), weights >= 0.
///
/// This is <y, (A - lambda)^{-1} y> written in the eigenbasis of A: poles are
/// the distinct eigenvalues, weights the squared norms of the projections of
/// y onto the eigenspaces. f' = sum_k w_k / (mu_k - lambda)^2 >= 0, so f is
/// increasing on every gap between poles and has at most one root there.
template <std::floating_point Real = double>
struct HerglotzScalar {
  std::vector<Real> poles;
  std::vector<Real> weights;

  Real operator()(Real lambda) const {
    Real s{0};
    for (std::size_t k = 0; k < poles.size(); ++k) s += weights[k] / (poles[k] - lambda);
    return s;
  }

  Real derivative(Real lambda) const {
    Real s{0};
    for (std::size_t k = 0; k < poles.size(); ++k) {
      const Real r = poles[k] - lambda;
      s += weights[k] / (r * r);
    }
    return s;
  }

  Real total_weight() const {
    Real s{0};
    for (Real w : weights) s += w;
    return s;
  }
};

template <std::floating_point Real>
HerglotzScalar<Real> herglotz_from(const SpectralDecomposition<Real>& d, std::span<const Real> y, Real cluster_tol) {
  if (y.size() != d.size()) throw InvalidArgument("herglotz_from: vector length does not match the matrix");
  if (norm(y) == Real{0}) throw InvalidArgument("herglotz_from: probe vector must be non-zero");
  HerglotzScalar<Real> h;
  for (const auto& c : clusters(d, cluster_tol)) {
    Real weight{0};
    for (std::size_t k = c.first; k < c.first + c.count; ++k) {
      Real proj{0};
      for (std::size_t i = 0; i < d.size(); ++i) proj += d.frame(i, k) * y[i];
      weight += proj * proj;
    }
    h.poles.push_back(c.value);
    h.weights.push_back(weight);
  }
  return h;
}

template <std::floating_point Real>
HerglotzScalar<Real> herglotz_from(const SpectralDecomposition<Real>& d, std::span<const Real> y) {
  return herglotz_from(d, y, default_cluster_tolerance(d));
}

inline constexpr double kGapEndpointOffset = 1e-9;
inline constexpr double kBisectionRelativeWidth = 1e-14;
inline constexpr int kBisectionMaxIterations = 80;

/// The unique root of h inside gap, if there is one.
///
/// Bounded gaps: f is sampled at a + eps and b - eps (eps = 1e-9 * width);
/// a root exists iff f(a + eps) <= 0 <= f(b - eps), and is then bisected.
/// Unbounded gaps never hold a root: f > 0 left of every pole and f < 0
/// right of every pole.
template <std::floating_point Real>
std::optional<Real> gap_root(const HerglotzScalar<Real>& h, const SpectralGap<Real>& g) {
  // h == 0 has no isolated root
  if (!g.bounded() || h.total_weight() == Real{0}) return std::nullopt;
  const Real eps = static_cast<Real>(kGapEndpointOffset) * g.width();
  Real lo = g.lower + eps;
  Real hi = g.upper - eps;
  const Real f_lo = h(lo);
  const Real f_hi = h(hi);
  if (f_lo > Real{0} || f_hi < Real{0}) return std::nullopt;
  if (f_lo == Real{0}) return lo;
  if (f_hi == Real{0}) return hi;

  const Real target =
      static_cast<Real>(kBisectionRelativeWidth) * std::max({Real{1}, std::abs(g.lower), std::abs(g.upper)});
  for (int it = 0; it < kBisectionMaxIterations && hi - lo > target; ++it) {
    const Real mid = lo + (hi - lo) / Real{2};
    const Real f_mid = h(mid);
    if (f_mid == Real{0}) return mid;
    if (f_mid < Real{0})
      lo = mid;
    else
      hi = mid;
  }
  return lo + (hi - lo) / Real{2};
}

}  // namespace protect
