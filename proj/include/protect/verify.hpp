#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "protect/flow.hpp"
#include "protect/protection.hpp"
#include "protect/realization.hpp"

namespace protect {

struct CheckRow {
  std::string name;
  std::string value;
  std::string verdict;  // "protected", "not protected" or "holds"/"fails" for verdict-free identities
  bool consistent;
};

struct VerificationResult {
  bool protected_point;
  std::vector<CheckRow> rows;
  std::optional<std::string> first_inconsistency;
};

struct VerifyOptions {
  double tolerance = kDefaultProtectionTolerance;
  double hit_tolerance = 1e-3;
  double pseudo_resolvent_tolerance = 1e-8;
  double inverse_formula_tolerance = 1e-8;  // times (1 + |t|)
  double identity_tolerance = 1e-8;
  double bounds_slack = 1e-10;  // relative rounding allowance on the distance sandwich
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace detail

/// Runs every available characterization of protection at lambda and checks
/// that they agree with the residual criterion.
///
/// Verdict-carrying checks (nilpotency, pseudo-resolvent, inverse formula,
/// brute-force sweep, pencil emptiness) must reach the same verdict as the
/// residual; the spectral identity and factorization must hold either way;
/// the distance sandwich is checked only for protected points.
inline VerificationResult verify_point(const PerturbationPair<double>& pair, double lambda,
                                       std::span<const double> t_grid, const VerifyOptions& opt = {}) {
  pair.require_nonzero_perturbation();
  require_off_spectrum(pair.spectrum(), lambda);

  VerificationResult out{};
  auto verdict_row = [&](std::string name, std::string value, bool says_protected) {
    out.rows.push_back({std::move(name), std::move(value), says_protected ? "protected" : "not protected",
                        says_protected == out.protected_point});
  };
  auto identity_row = [&](std::string name, std::string value, bool holds) {
    out.rows.push_back({std::move(name), std::move(value), holds ? "holds" : "fails", holds});
  };

  const auto base = is_protected(pair, lambda, opt.tolerance);
  out.protected_point = base.is_protected;
  verdict_row("residual B(A-l)^-1B", detail::sci(base.residual), base.is_protected);

  const auto index = nilpotency_index(pair, lambda);
  verdict_row("nilpotency of (A-l)^-1B", index ? "index " + std::to_string(*index) : "not nilpotent",
              index && *index <= 2);

  constexpr std::array<std::pair<double, double>, 4> zw{{{1.0, 2.0}, {-1.0, 3.0}, {0.5, -2.0}, {10.0, -7.0}}};
  double pr_worst = 0.0;
  for (auto [z, w] : zw) pr_worst = std::max(pr_worst, pseudo_resolvent_defect(pair, lambda, z, w));
  verdict_row("pseudo-resolvent identity", detail::sci(pr_worst), pr_worst <= opt.pseudo_resolvent_tolerance);

  double inv_worst = 0.0;
  bool inv_all = true;
  for (double t : t_grid) {
    const double d = shifted_inverse_formula(pair, lambda, t).defect;
    inv_worst = std::max(inv_worst, d / (1.0 + std::abs(t)));
    if (d > opt.inverse_formula_tolerance * (1.0 + std::abs(t))) inv_all = false;
  }
  verdict_row("inverse formula defect/(1+|t|)", detail::sci(inv_worst), inv_all);

  if (out.protected_point) {
    bool sandwiched = true;
    double tightest = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
      const auto b = distance_bounds(pair, t, lambda);
      const double slack = 1.0 + opt.bounds_slack;
      if (b.actual * slack < b.lower) sandwiched = false;
      if (b.upper && b.actual > *b.upper * slack) sandwiched = false;
      tightest = std::min(tightest, b.actual / b.lower);
    }
    identity_row("distance sandwich", "min actual/lower " + detail::sci(tightest), sandwiched);
  } else {
    out.rows.push_back({"distance sandwich", "requires a protected point", "skipped", true});
  }

  const std::array<double, 1> lambdas{lambda};
  const auto oracle = brute_force_unprotected<double>(pair.a(), pair.b(), lambdas, t_grid, opt.hit_tolerance);
  const bool crossed = oracle.never_crossed.empty();
  const bool hit = oracle.never_hit.empty();
  std::string oracle_value = "min dist " + detail::sci(oracle.min_distance[0]) + (crossed ? ", crossing" : ", no crossing");
  if (oracle.first_hit[0]) oracle_value += ", within hit_tol at t=" + detail::sci(*oracle.first_hit[0]);
  // Protected points are approached arbitrarily closely for large |t| but never crossed.
  verdict_row("brute-force sweep", oracle_value, out.protected_point ? !crossed : !(crossed || hit));

  double t_max = 1e-2;
  for (double t : t_grid) t_max = std::max(t_max, std::abs(t));
  const auto roots = pencil_spectrum_log_chunked(pair.a().shifted(lambda), pair.b(), t_max);
  std::string roots_value = roots.empty() ? "empty" : std::to_string(roots.size()) + " root(s), first " + detail::sci(roots.front());
  verdict_row("pencil spectrum of (A-l, B)", roots_value, roots.empty());

  const double ident = spectral_identity_defect(pair, lambda);
  identity_row("spec(BR)\\{0} = spec(B^1/2 R B^1/2)\\{0}", detail::sci(ident), ident <= opt.identity_tolerance);

  double fact = 0.0;
  for (double z : {1.0, -2.5, 40.0}) fact = std::max(fact, factorization_defect(pair, lambda, z));
  identity_row("factorization (A+zB) = (I+zBA^-1)A", detail::sci(fact), fact <= opt.identity_tolerance);

  for (const auto& row : out.rows)
    if (!row.consistent) {
      out.first_inconsistency = row.name + ": " + row.value + " (" + row.verdict + ")";
      break;
    }
  return out;
}

}  // namespace protect
