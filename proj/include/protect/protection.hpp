#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "protect/errors.hpp"
#include "protect/herglotz.hpp"
#include "protect/matrix.hpp"
#include "protect/spectral.hpp"

namespace protect {

inline constexpr double kDefaultProtectionTolerance = 1e-8;
inline constexpr double kZeroPerturbationTolerance = 1e-12;
inline constexpr double kUnresolvableGapWidth = 1e-12;

/// An operator A with a positive semi-definite perturbation B, validated once.
///
/// Holds the eigendecomposition of A so that repeated evaluations at
/// different shifts do not re-diagonalize.
template <std::floating_point Real = double>
class PerturbationPair {
 public:
  PerturbationPair(SymmetricMatrix<Real> a, SymmetricMatrix<Real> b)
      : a_(std::move(a)), b_(std::move(b)), spectrum_(eigh(a_)), b_spectrum_(eigh(b_)) {
    if (a_.size() != b_.size()) throw InvalidArgument("A and B must have the same dimension");
    b_min_eigenvalue_ = require_psd(b_spectrum_);
    b_norm_ = frobenius(b_);
  }

  const SymmetricMatrix<Real>& a() const noexcept { return a_; }
  const SymmetricMatrix<Real>& b() const noexcept { return b_; }
  const SpectralDecomposition<Real>& spectrum() const noexcept { return spectrum_; }
  const SpectralDecomposition<Real>& b_spectrum() const noexcept { return b_spectrum_; }
  std::size_t size() const noexcept { return a_.size(); }
  Real b_norm() const noexcept { return b_norm_; }
  Real b_min_eigenvalue() const noexcept { return b_min_eigenvalue_; }
  Real scale() const noexcept { return std::max(spectrum_.source_scale, b_spectrum_.source_scale); }

  bool perturbation_is_zero() const noexcept {
    return b_norm_ <= static_cast<Real>(kZeroPerturbationTolerance) * scale();
  }

  void require_nonzero_perturbation() const {
    if (perturbation_is_zero()) throw DegeneratePerturbation();
  }

  /// A + t B - lambda I
  SymmetricMatrix<Real> shifted_pencil(Real t, Real lambda) const { return (a_ + t * b_).shifted(lambda); }

 private:
  SymmetricMatrix<Real> a_;
  SymmetricMatrix<Real> b_;
  SpectralDecomposition<Real> spectrum_;
  SpectralDecomposition<Real> b_spectrum_;
  Real b_min_eigenvalue_{0};
  Real b_norm_{0};
};

/// ||B (A - lambda)^{-1} B||_F / (||B||_F^2 / dist(lambda, spec A)).
///
/// Dimensionless, invariant under (A, B, lambda) -> (cA, cB, c lambda), and
/// zero exactly when B (A - lambda)^{-1} B = 0.
template <std::floating_point Real>
Real protection_residual(const PerturbationPair<Real>& pair, Real lambda) {
  const auto& d = pair.spectrum();
  require_off_spectrum(d, lambda);
  const std::size_t n = pair.size();
  // G = B * frame; B R B = G diag(1 / (mu - lambda)) G^T
  const DenseMatrix<Real> g = pair.b().dense() * d.frame;
  Real sum{0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Real s{0};
      for (std::size_t k = 0; k < n; ++k) s += g(i, k) * g(j, k) / (d.eigenvalues[k] - lambda);
      sum += s * s;
    }
  const Real normalizer = pair.b_norm() * pair.b_norm() / dist_to_spectrum(d, lambda);
  return std::sqrt(sum) / std::max(Real(1e-300), normalizer);
}

template <std::floating_point Real>
Real protection_residual(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b, Real lambda) {
  return protection_residual(PerturbationPair<Real>(a, b), lambda);
}

template <std::floating_point Real = double>
struct ProtectionVerdict {
  bool in_gap;
  bool is_protected;
  Real residual;  // +inf when lambda is on the spectrum of A

  explicit operator bool() const noexcept { return is_protected; }
};

/// lambda is protected iff it lies in a gap of A and the protection residual
/// is at most tol; then lambda is in the resolvent set of A + tB for all t.
template <std::floating_point Real>
ProtectionVerdict<Real> is_protected(const PerturbationPair<Real>& pair, Real lambda,
                                     Real tol = static_cast<Real>(kDefaultProtectionTolerance)) {
  pair.require_nonzero_perturbation();
  const auto& d = pair.spectrum();
  if (dist_to_spectrum(d, lambda) <= static_cast<Real>(kPoleTolerance) * d.source_scale)
    return {false, false, std::numeric_limits<Real>::infinity()};
  const Real r = protection_residual(pair, lambda);
  return {true, r <= tol, r};
}

template <std::floating_point Real>
ProtectionVerdict<Real> is_protected(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b, Real lambda,
                                     Real tol = static_cast<Real>(kDefaultProtectionTolerance)) {
  return is_protected(PerturbationPair<Real>(a, b), lambda, tol);
}

template <std::floating_point Real = double>
struct ProtectedPoint {
  Real lambda;
  Real residual;
  SpectralGap<Real> gap;
};

enum class GapStatus { certified, rejected, no_root, unresolvable };

inline const char* to_string(GapStatus s) {
  switch (s) {
    case GapStatus::certified: return "certified";
    case GapStatus::rejected: return "rejected";
    case GapStatus::no_root: return "no_root";
    case GapStatus::unresolvable: return "unresolvable";
  }
  return "unknown";
}

template <std::floating_point Real = double>
struct GapDiagnostic {
  SpectralGap<Real> gap;
  GapStatus status;
  std::optional<Real> probe_root;
  std::optional<Real> residual;
};

template <std::floating_point Real = double>
struct ProtectionReport {
  std::vector<ProtectedPoint<Real>> protected_points;
  std::vector<GapDiagnostic<Real>> gap_diagnostics;
  Real tolerance;
  Real cluster_tolerance;
  std::size_t probe_index;
};

/// Index maximizing ||B e_i||; ties resolve to the smallest index.
template <std::floating_point Real>
std::size_t probe_index(const SymmetricMatrix<Real>& b) {
  std::size_t best = 0;
  Real best_norm{-1};
  for (std::size_t i = 0; i < b.size(); ++i) {
    Real s{0};
    for (std::size_t j = 0; j < b.size(); ++j) s += b(j, i) * b(j, i);
    if (s > best_norm) {
      best_norm = s;
      best = i;
    }
  }
  return best;
}

/// All protected points of (A, B).
///
/// Protection at lambda forces <e_i, B (A - lambda)^{-1} B e_i> = 0 for the
/// probe column y = B e_i. That scalar is a Herglotz function of lambda, so
/// each bounded gap of A holds at most one candidate: its root. Each
/// candidate is then certified against the full matrix residual.
template <std::floating_point Real>
ProtectionReport<Real> protected_set(const PerturbationPair<Real>& pair,
                                     Real tol = static_cast<Real>(kDefaultProtectionTolerance),
                                     std::optional<Real> cluster_tolerance = std::nullopt) {
  pair.require_nonzero_perturbation();
  const auto& d = pair.spectrum();
  const Real cluster_tol = cluster_tolerance ? *cluster_tolerance : default_cluster_tolerance(d);

  ProtectionReport<Real> report;
  report.tolerance = tol;
  report.cluster_tolerance = cluster_tol;
  report.probe_index = probe_index(pair.b());

  Vector<Real> y(pair.size());
  for (std::size_t j = 0; j < pair.size(); ++j) y[j] = pair.b()(j, report.probe_index);
  const auto h = herglotz_from<Real>(d, y, cluster_tol);

  for (const auto& g : gaps(d, cluster_tol)) {
    if (!g.bounded()) continue;
    if (g.width() < static_cast<Real>(kUnresolvableGapWidth) * d.source_scale) {
      report.gap_diagnostics.push_back({g, GapStatus::unresolvable, std::nullopt, std::nullopt});
      continue;
    }
    const auto root = gap_root(h, g);
    if (!root) {
      report.gap_diagnostics.push_back({g, GapStatus::no_root, std::nullopt, std::nullopt});
      continue;
    }
    Real r;
    try {
      r = protection_residual(pair, *root);
    } catch (const PoleError&) {
      report.gap_diagnostics.push_back({g, GapStatus::rejected, root, std::nullopt});
      continue;
    }
    if (r <= tol) {
      report.protected_points.push_back({*root, r, g});
      report.gap_diagnostics.push_back({g, GapStatus::certified, root, r});
    } else {
      report.gap_diagnostics.push_back({g, GapStatus::rejected, root, r});
    }
  }
  return report;
}

template <std::floating_point Real>
ProtectionReport<Real> protected_set(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b,
                                     Real tol = static_cast<Real>(kDefaultProtectionTolerance)) {
  return protected_set(PerturbationPair<Real>(a, b), tol);
}

template <std::floating_point Real = double>
struct InverseFormulaResult {
  SymmetricMatrix<Real> inverse;  // R - t R B R with R = (A - lambda)^{-1}
  Real defect;                    // ||(A + tB - lambda) M - I||_F
};

/// Candidate inverse of A + tB - lambda built from the resolvent of A alone.
/// Exact for every t when lambda is protected; the defect equals
/// t^2 ||B R B R||_F otherwise.
template <std::floating_point Real>
InverseFormulaResult<Real> shifted_inverse_formula(const PerturbationPair<Real>& pair, Real lambda, Real t) {
  const SymmetricMatrix<Real> r = resolvent_matrix(pair.spectrum(), lambda);
  const DenseMatrix<Real> rd = r.dense();
  const SymmetricMatrix<Real> rbr = symmetric_part(rd * pair.b().dense() * rd);
  SymmetricMatrix<Real> m = r - t * rbr;
  const DenseMatrix<Real> product = pair.shifted_pencil(t, lambda).dense() * m.dense();
  const Real defect = frobenius(product - DenseMatrix<Real>::identity(pair.size()));
  return {std::move(m), defect};
}

inline constexpr double kNilpotencyTolerance = 1e-10;

/// (A - lambda)^{-1} B, the matrix whose nilpotency mirrors protection.
template <std::floating_point Real>
DenseMatrix<Real> resolvent_times_perturbation(const PerturbationPair<Real>& pair, Real lambda) {
  return resolvent_matrix(pair.spectrum(), lambda).dense() * pair.b().dense();
}

/// Smallest k <= n with ||N^k||_F <= 1e-10 ||N||_F^k for N = (A - lambda)^{-1} B.
template <std::floating_point Real>
std::optional<std::size_t> nilpotency_index(const PerturbationPair<Real>& pair, Real lambda) {
  const DenseMatrix<Real> n = resolvent_times_perturbation(pair, lambda);
  const Real base = frobenius(n);
  if (base == Real{0}) return 1;
  DenseMatrix<Real> power = n;
  Real scale = base;
  for (std::size_t k = 1; k <= pair.size(); ++k) {
    if (k > 1) {
      power = power * n;
      scale *= base;
    }
    if (frobenius(power) <= static_cast<Real>(kNilpotencyTolerance) * scale) return k;
  }
  return std::nullopt;
}

/// Defect of the resolvent identity R(z) - R(w) = (w - z) R(z) R(w) for
/// R(s) = ((A-lambda)^{-1} - s (A-lambda)^{-1} B (A-lambda)^{-1}) B.
///
/// The sign follows from (X + zB)^{-1} - (X + wB)^{-1}
/// = (w - z) (X + zB)^{-1} B (X + wB)^{-1}, multiplied by B on the right.
/// Returned relative to max(1, ||R(z)|| + ||R(w)|| + |w - z| ||R(z)|| ||R(w)||),
/// which is invariant under a common rescaling of A, B and lambda.
template <std::floating_point Real>
Real pseudo_resolvent_defect(const PerturbationPair<Real>& pair, Real lambda, Real z, Real w) {
  const DenseMatrix<Real> r = resolvent_matrix(pair.spectrum(), lambda).dense();
  const DenseMatrix<Real> b = pair.b().dense();
  const DenseMatrix<Real> rbr = r * b * r;
  const DenseMatrix<Real> rz = (r - z * rbr) * b;
  const DenseMatrix<Real> rw = (r - w * rbr) * b;
  const DenseMatrix<Real> lhs = rz - rw;
  const DenseMatrix<Real> rhs = (w - z) * (rz * rw);
  const Real nz = frobenius(rz);
  const Real nw = frobenius(rw);
  const Real normalizer = std::max(Real{1}, nz + nw + std::abs(w - z) * nz * nw);
  return frobenius(lhs - rhs) / normalizer;
}

template <std::floating_point Real = double>
struct DistanceBounds {
  Real lower;
  std::optional<Real> upper;
  Real actual;  // 1 / ||(A + tB - lambda)^{-1}||, inverse from the protected formula
  Real direct;  // dist(lambda, spec(A + tB)) from an eigensolve of A + tB
  Real nu;      // ||R B R||_2
  Real eta;     // ||R||_2
};

/// Two-sided bounds on dist(lambda, spec(A + tB)) for a protected lambda:
/// 1/(|t| nu + eta) <= dist <= 1/(|t| nu - eta), the upper one for |t| > eta/nu.
///
/// `actual` inverts the norm of the exact inverse R - tRBR; for large |t| this
/// is far more accurate than the smallest eigenvalue of A + tB, whose absolute
/// error grows like eps * |t| * ||B||.
template <std::floating_point Real>
DistanceBounds<Real> distance_bounds(const PerturbationPair<Real>& pair, Real t, Real lambda = Real{0}) {
  pair.require_nonzero_perturbation();
  const auto verdict = is_protected(pair, lambda);
  if (!verdict.is_protected)
    throw PreconditionError("distance bounds require a protected point; residual at " + std::to_string(lambda) +
                            " is " + std::to_string(static_cast<double>(verdict.residual)));
  const SymmetricMatrix<Real> r = resolvent_matrix(pair.spectrum(), lambda);
  const DenseMatrix<Real> rd = r.dense();
  const SymmetricMatrix<Real> rbr = symmetric_part(rd * pair.b().dense() * rd);
  DistanceBounds<Real> out;
  out.nu = operator_norm(rbr);
  out.eta = operator_norm(r);
  const Real at = std::abs(t);
  out.lower = Real{1} / (at * out.nu + out.eta);
  if (at * out.nu > out.eta) out.upper = Real{1} / (at * out.nu - out.eta);
  out.actual = Real{1} / operator_norm(r - t * rbr);
  out.direct = dist_to_spectrum(eigh(pair.shifted_pencil(t, Real{0})), lambda);
  return out;
}

template <std::floating_point Real>
DistanceBounds<Real> distance_bounds(const SymmetricMatrix<Real>& a, const SymmetricMatrix<Real>& b, Real t,
                                     Real lambda = Real{0}) {
  return distance_bounds(PerturbationPair<Real>(a, b), t, lambda);
}

/// Compares the non-zero spectrum of B (A - lambda)^{-1} with that of the
/// self-adjoint B^{1/2} (A - lambda)^{-1} B^{1/2}.
///
/// Two routes: every non-zero eigenvalue s of the symmetric form must make
/// B R - s I singular (smallest singular value, from the augmented matrix
/// [[0, M], [M^T, 0]]), and the power traces tr((B R)^k) = tr(S^k) must agree
/// for k = 1..n, which pins the whole non-zero multiset. Returns the largest
/// relative mismatch.
template <std::floating_point Real>
Real spectral_identity_defect(const PerturbationPair<Real>& pair, Real lambda) {
  const std::size_t n = pair.size();
  const SymmetricMatrix<Real> r = resolvent_matrix(pair.spectrum(), lambda);
  const SymmetricMatrix<Real> root = psd_sqrt(pair.b_spectrum());
  const SymmetricMatrix<Real> s = symmetric_part(root.dense() * r.dense() * root.dense());
  const DenseMatrix<Real> br = pair.b().dense() * r.dense();
  const auto s_spec = eigh(s);
  const Real s_norm = operator_norm(s_spec);
  const Real br_norm = frobenius(br);
  if (s_norm == Real{0} && br_norm == Real{0}) return Real{0};

  Real defect{0};
  for (Real sigma : s_spec.eigenvalues) {
    if (std::abs(sigma) <= Real(1e-8) * s_norm) continue;
    std::vector<Real> aug(4 * n * n, Real{0});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Real mij = br(i, j) - (i == j ? sigma : Real{0});
        aug[i * 2 * n + (n + j)] = mij;
        aug[(n + j) * 2 * n + i] = mij;
      }
    const auto aug_spec = eigh(SymmetricMatrix<Real>(2 * n, std::move(aug)));
    Real smallest = std::numeric_limits<Real>::infinity();
    for (Real e : aug_spec.eigenvalues) smallest = std::min(smallest, std::abs(e));
    defect = std::max(defect, smallest / std::max(s_norm, br_norm));
  }

  // Powers of the matrices scaled by 1/ref stay bounded for every k.
  const Real ref = std::max(s_norm, br_norm);
  const DenseMatrix<Real> br_unit = (Real{1} / ref) * br;
  const DenseMatrix<Real> s_unit = (Real{1} / ref) * s.dense();
  DenseMatrix<Real> br_power = br_unit;
  DenseMatrix<Real> s_power = s_unit;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      br_power = br_power * br_unit;
      s_power = s_power * s_unit;
    }
    defect = std::max(defect, std::abs(br_power.trace() - s_power.trace()) / static_cast<Real>(n));
  }
  return defect;
}

/// ||(X + zB) - (I + z B X^{-1}) X||_F / max(1, ||X + zB||_F), X = A - lambda.
template <std::floating_point Real>
Real factorization_defect(const PerturbationPair<Real>& pair, Real lambda, Real z) {
  const std::size_t n = pair.size();
  const DenseMatrix<Real> x = pair.a().shifted(lambda).dense();
  const DenseMatrix<Real> br = pair.b().dense() * resolvent_matrix(pair.spectrum(), lambda).dense();
  const DenseMatrix<Real> factored = (DenseMatrix<Real>::identity(n) + z * br) * x;
  const DenseMatrix<Real> direct = pair.shifted_pencil(z, lambda).dense();
  return frobenius(direct - factored) / std::max(Real{1}, frobenius(direct));
}

}  // namespace protect
