/// @file linalg.hpp
/// @brief Dense factorization of the Leontief-style operator (I - C).

#pragma once
#include <Eigen/Dense>
#include <cstdio>
#include <string>

#include "crashnet/error.hpp"

namespace crashnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Reciprocal condition numbers below this are treated as singular.
inline constexpr double kSingularRcond = 1e-12;

/// LU factorization (partial pivoting) of I - C, reused for every solve.
class ResolventSolver {
 public:
  explicit ResolventSolver(const Matrix& cross_holdings)
      : lu_(Matrix::Identity(cross_holdings.rows(), cross_holdings.cols()) -
            cross_holdings) {
    rcond_ = lu_.rcond();
    if (!(rcond_ >= kSingularRcond)) {
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "(I - C) is singular: reciprocal condition estimate %.3g",
                    rcond_);
      throw NumericError(buf);
    }
  }

  /// Solves (I - C) x = rhs.
  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }
  Matrix inverse() const { return lu_.inverse(); }
  double rcond() const { return rcond_; }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_ = 0.0;
};

/// Reciprocal condition estimate of I - C without throwing.
inline double resolvent_rcond(const Matrix& cross_holdings) {
  Eigen::PartialPivLU<Matrix> lu(
      Matrix::Identity(cross_holdings.rows(), cross_holdings.cols()) -
      cross_holdings);
  return lu.rcond();
}

}  // namespace crashnet
