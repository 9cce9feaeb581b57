/// @file hubo.hpp
/// @brief Expansion of the equilibrium objective into a multilinear
/// polynomial over the market-value bits.
/// @details With M = C~ (I - C)^{-1} and u = M D p the objective is
/// \f[ \sum_i \Bigl(v_i - u_i + \sum_j M_{ij}\, \tilde b_j(v_j)\Bigr)^2, \f]
/// where \f$\tilde b_j(v) = \beta_j (1 - T_r((v - v_{c,j}) / v_{max}))\f$ is the
/// smoothed failure term (absent in the linear model). Each v_i is replaced
/// by its fixed-point bit expansion and everything is multiplied out. Bit b
/// of institution i gets variable id i * bits + b.

#pragma once
#include <optional>
#include <span>
#include <vector>

#include "crashnet/encoding.hpp"
#include "crashnet/equilibrium.hpp"
#include "crashnet/legendre.hpp"
#include "crashnet/polynomial.hpp"

namespace crashnet {

struct HuboOptions {
  std::size_t term_cap = kDefaultTermCap;
  double prune_tolerance = 1e-12;  ///< relative to the largest coefficient
};

struct HuboStats {
  std::size_t num_variables = 0;
  std::vector<std::size_t> order_counts;
  std::size_t pruned_terms = 0;
};

inline VarId hubo_variable(const BitSpec& spec, std::size_t institution, int bit) {
  return static_cast<VarId>(institution * static_cast<std::size_t>(spec.bits()) +
                            static_cast<std::size_t>(bit));
}

/// v_i as a linear binary polynomial in institution i's bits.
inline BinaryPolynomial encoded_value(const BitSpec& spec, std::size_t institution) {
  BinaryPolynomial p;
  for (int b = 0; b < spec.bits(); ++b)
    p.add_term({hubo_variable(spec, institution, b)}, spec.weight(b));
  return p;
}

/// T_r(x) with x itself a polynomial, via the Bonnet recurrence.
inline BinaryPolynomial theta_of(const ThetaPolynomial& tp, const BinaryPolynomial& x,
                                 std::size_t term_cap) {
  BinaryPolynomial result = BinaryPolynomial::constant(0.5);
  BinaryPolynomial prev = BinaryPolynomial::constant(1.0);
  BinaryPolynomial cur = x;
  for (int l = 1; l <= tp.degree; ++l) {
    if (l > 1) {
      BinaryPolynomial next = x.multiply(cur, term_cap) * (double(2 * l - 1) / l);
      next -= prev * (double(l - 1) / l);
      prev = std::move(cur);
      cur = std::move(next);
    }
    const double c = tp.coefficients.at(l);
    if (c != 0.0) result += cur * c;
  }
  return result;
}

/// Builds the objective polynomial. Without @p fail the result is the linear
/// model sum_i (v_i - u_i)^2 and @p degree is ignored.
inline BinaryPolynomial build_hubo(const FinancialNetwork& net,
                                   const std::optional<FailureSpec>& fail,
                                   const BitSpec& spec,
                                   std::optional<int> degree = std::nullopt,
                                   const HuboOptions& opt = {},
                                   HuboStats* stats = nullptr) {
  spec.check();
  const std::size_t n = net.n_institutions();
  if (fail) {
    if (!degree) throw ParameterError("build_hubo: failure term needs a degree r");
    auto bad = validate(*fail, n);
    if (!bad.empty()) throw ParameterError("build_hubo: " + bad.front().message);
  }
  const EquilibriumOperator op(net);
  const Matrix& map = op.map();
  const Vector& u = op.baseline();

  std::vector<BinaryPolynomial> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(encoded_value(spec, i));

  // M_ij * b~_j summed later; b~_j depends on v_j only.
  std::vector<BinaryPolynomial> failure_terms;
  if (fail) {
    const ThetaPolynomial tp = theta_coefficients(*degree);
    const double v_max = spec.v_max();
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      BinaryPolynomial x = values[j] * (1.0 / v_max);
      x.add_term({}, -fail->critical_values[jj] / v_max);
      BinaryPolynomial b = BinaryPolynomial::constant(1.0) - theta_of(tp, x, opt.term_cap);
      failure_terms.push_back(b * fail->failure_magnitudes[jj]);
    }
  }

  BinaryPolynomial total(n * static_cast<std::size_t>(spec.bits()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    BinaryPolynomial residual = values[i];
    residual.add_term({}, -u[ii]);
    for (std::size_t j = 0; j < failure_terms.size(); ++j) {
      const double w = map(ii, static_cast<Eigen::Index>(j));
      if (w != 0.0) residual += failure_terms[j] * w;
    }
    total += residual.multiply(residual, opt.term_cap);
    if (total.size() > opt.term_cap)
      throw ResourceError("build_hubo: " + std::to_string(total.size()) +
                          " terms exceed the cap of " + std::to_string(opt.term_cap));
  }
  const std::size_t pruned = total.prune(opt.prune_tolerance);

  std::vector<VariableLabel> labels;
  for (std::size_t i = 0; i < n; ++i)
    for (int b = 0; b < spec.bits(); ++b)
      labels.push_back({false, static_cast<int>(i), spec.alpha_min + b});
  total.set_num_variables(labels.size());
  total.set_labels(std::move(labels));

  if (stats) {
    stats->num_variables = total.num_variables();
    stats->order_counts = total.order_counts();
    stats->pruned_terms = pruned;
  }
  return total;
}

/// Market values from the logical bits of an assignment.
inline Vector decode_market_values(const BitSpec& spec, std::size_t n_institutions,
                                   std::span<const std::uint8_t> assignment) {
  const auto bits = static_cast<std::size_t>(spec.bits());
  if (assignment.size() < n_institutions * bits)
    throw ParameterError("decode_market_values: assignment too short");
  Vector v(static_cast<Eigen::Index>(n_institutions));
  for (std::size_t i = 0; i < n_institutions; ++i)
    v[static_cast<Eigen::Index>(i)] =
        decode_bits(spec, assignment.subspan(i * bits, bits));
  return v;
}

/// Logical bit assignment for given market values (each must be representable
/// or is rounded down).
inline std::vector<std::uint8_t> encode_market_values(const BitSpec& spec,
                                                      const Vector& v) {
  std::vector<std::uint8_t> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto bits = encode_value(spec, v[i]);
    out.insert(out.end(), bits.begin(), bits.end());
  }
  return out;
}

}  // namespace crashnet
