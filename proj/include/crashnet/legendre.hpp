/// @file legendre.hpp
/// @brief Legendre polynomials and the truncated Legendre series of the
/// Heaviside step used to smooth the failure term.
/// @details The step is approximated by
/// \f[ T_r(x) = \tfrac12 + \sum_{l=1}^{r} \bigl(P_{l-1}(0) + P_{l+1}(0)\bigr) P_l(x). \f]
/// Only odd l contribute, so T_r(0) = 1/2 and T_r(x) + T_r(-x) = 1.

#pragma once
#include <cmath>
#include <map>
#include <string>

#include "crashnet/error.hpp"

namespace crashnet {

/// (l+1) P_{l+1}(x) = (2l+1) x P_l(x) - l P_{l-1}(x), unchecked domain.
template <typename T>
T legendre_unchecked(int l, T x) {
  if (l == 0) return T(1);
  T prev = T(1);
  T cur = x;
  for (int k = 1; k < l; ++k) {
    T next = (T(2 * k + 1) * x * cur - T(k) * prev) / T(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// P_l(x) on [-1, 1].
inline double legendre(int l, double x) {
  if (l < 0) throw ParameterError("legendre: order must be >= 0");
  if (!(std::abs(x) <= 1.0))
    throw ParameterError("legendre: x = " + std::to_string(x) +
                         " outside [-1, 1]");
  return legendre_unchecked(l, x);
}

/// Truncated step series of odd degree r; coefficients keyed by order l.
struct ThetaPolynomial {
  int degree = 1;
  std::map<int, double> coefficients;

  /// Evaluates without a domain check. Grid points of the encoded market
  /// values may fall slightly outside [-1, 1]; the series is then continued
  /// as the polynomial it is.
  double evaluate_extended(double x) const {
    double sum = 0.5;
    double prev = 1.0;
    double cur = x;
    for (int l = 1; l <= degree; ++l) {
      if (l > 1) {
        const double next =
            (double(2 * l - 1) * x * cur - double(l - 1) * prev) / double(l);
        prev = cur;
        cur = next;
      }
      if (auto it = coefficients.find(l); it != coefficients.end())
        sum += it->second * cur;
    }
    return sum;
  }
};

inline ThetaPolynomial theta_coefficients(int r) {
  if (r < 1 || r % 2 == 0)
    throw ParameterError("theta_coefficients: degree must be odd and >= 1, got " +
                         std::to_string(r));
  ThetaPolynomial tp;
  tp.degree = r;
  for (int l = 1; l <= r; ++l) {
    const double c =
        legendre_unchecked(l - 1, 0.0) + legendre_unchecked(l + 1, 0.0);
    tp.coefficients[l] = (l % 2 == 0) ? 0.0 : c;
  }
  return tp;
}

/// T_r(x) for |x| <= 1.
inline double smoothed_theta(const ThetaPolynomial& tp, double x) {
  if (!(std::abs(x) <= 1.0))
    throw ParameterError("smoothed_theta: x = " + std::to_string(x) +
                         " outside [-1, 1]");
  return tp.evaluate_extended(x);
}

}  // namespace crashnet
