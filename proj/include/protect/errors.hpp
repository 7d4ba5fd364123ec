#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace protect {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be symmetric is not, beyond the relative tolerance.
class NotSymmetric : public Error {
 public:
  NotSymmetric(std::size_t row, std::size_t col, double deviation)
      : Error("matrix is not symmetric: entries (" + std::to_string(row) + "," + std::to_string(col) +
              ") and (" + std::to_string(col) + "," + std::to_string(row) + ") differ by " +
              std::to_string(deviation)),
        row_(row),
        col_(col),
        deviation_(deviation) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::size_t row_;
  std::size_t col_;
  double deviation_;
};

class NotPositiveSemidefinite : public Error {
 public:
  explicit NotPositiveSemidefinite(double min_eigenvalue)
      : Error("perturbation not positive semi-definite (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The evaluation point coincides with an eigenvalue (a pole of the resolvent).
class PoleError : public Error {
 public:
  PoleError(double point, double pole)
      : Error("point " + std::to_string(point) + " lies on the spectrum (eigenvalue " + std::to_string(pole) + ")"),
        point_(point),
        pole_(pole) {}

  double point() const noexcept { return point_; }
  double pole() const noexcept { return pole_; }

 private:
  double point_;
  double pole_;
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(double off_diagonal_residual)
      : Error("Jacobi iteration did not converge (off-diagonal residual " + std::to_string(off_diagonal_residual) +
              ")"),
        residual_(off_diagonal_residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// B = 0: the spectrum of A + tB does not move, nothing to analyse.
class DegeneratePerturbation : public Error {
 public:
  DegeneratePerturbation()
      : Error("perturbation B is zero: spec(A + tB) = spec(A) for every t, so the protected set is simply the "
              "resolvent set of A; a non-zero B is required") {}
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace protect
