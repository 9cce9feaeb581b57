/// @file network.hpp
/// @brief Cross-holding financial networks: construction, random generation,
/// validation and price perturbation.
/// @details A network has n institutions and m assets. Institution i owns the
/// fraction D(i,k) of asset k and the fraction C(i,j) of institution j; the
/// diagonal self-ownership is kept apart in @c self_ownership. Columns of D
/// sum to one, and for each institution j the cross-holdings of j plus its
/// self-ownership sum to one.

#pragma once
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "crashnet/error.hpp"
#include "crashnet/linalg.hpp"
#include "crashnet/rng.hpp"

namespace crashnet {

inline constexpr double kNetworkTolerance = 1e-9;

struct FinancialNetwork {
  Matrix ownership;       ///< n x m, D(i,k)
  Matrix cross_holdings;  ///< n x n, C(i,j), zero diagonal
  Vector self_ownership;  ///< n, diagonal of C~
  Vector prices;          ///< m, p

  std::size_t n_institutions() const {
    return static_cast<std::size_t>(ownership.rows());
  }
  std::size_t n_assets() const {
    return static_cast<std::size_t>(ownership.cols());
  }
  /// D p, the direct asset value held by each institution.
  Vector asset_values() const { return ownership * prices; }
};

/// Panic nonlinearity: institution i loses failure_magnitudes[i] of equity
/// once its market value drops below critical_values[i].
struct FailureSpec {
  Vector critical_values;
  Vector failure_magnitudes;
};

struct Violation {
  std::string invariant;  ///< short invariant name, e.g. "self_ownership_bound"
  std::string message;    ///< human-readable detail including the index
};

namespace detail {

inline bool all_finite_nonnegative(const Eigen::Ref<const Matrix>& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j)) || a(i, j) < 0.0) return false;
  return true;
}

inline void check_entries(const Eigen::Ref<const Matrix>& a,
                          const std::string& field,
                          std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      if (!std::isfinite(x) || x < 0.0) {
        std::string where = a.cols() == 1
                                ? "[" + std::to_string(i) + "]"
                                : "[" + std::to_string(i) + "][" +
                                      std::to_string(j) + "]";
        out.push_back({"nonnegative_finite",
                       field + where + " = " + std::to_string(x) +
                           " is negative or not finite"});
      }
    }
}

}  // namespace detail

/// Lists every broken network invariant; empty when the network is valid.
inline std::vector<Violation> validate(const FinancialNetwork& net) {
  std::vector<Violation> out;
  const auto n = net.ownership.rows();
  const auto m = net.ownership.cols();
  if (n < 1 || m < 1) {
    out.push_back({"dimensions", "ownership must be at least 1 x 1"});
    return out;
  }
  if (net.cross_holdings.rows() != n || net.cross_holdings.cols() != n ||
      net.self_ownership.size() != n || net.prices.size() != m) {
    out.push_back({"dimensions",
                   "cross_holdings must be n x n, self_ownership length n and "
                   "prices length m"});
    return out;
  }
  detail::check_entries(net.ownership, "ownership", out);
  detail::check_entries(net.cross_holdings, "cross_holdings", out);
  detail::check_entries(net.self_ownership, "self_ownership", out);
  detail::check_entries(net.prices, "prices", out);

  for (Eigen::Index k = 0; k < m; ++k) {
    const double s = net.ownership.col(k).sum();
    if (!(std::abs(s - 1.0) <= kNetworkTolerance))
      out.push_back({"ownership_column_sum",
                     "ownership column " + std::to_string(k) + " sums to " +
                         std::to_string(s) + ", expected 1"});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (net.cross_holdings(j, j) != 0.0)
      out.push_back({"cross_holdings_diagonal",
                     "cross_holdings[" + std::to_string(j) + "][" +
                         std::to_string(j) + "] must be exactly 0"});
    if (!(net.self_ownership[j] > 0.5))
      out.push_back({"self_ownership_bound",
                     "self_ownership[" + std::to_string(j) + "] = " +
                         std::to_string(net.self_ownership[j]) +
                         " must exceed 0.5"});
    const double s = net.cross_holdings.col(j).sum() + net.self_ownership[j];
    if (!(std::abs(s - 1.0) <= kNetworkTolerance))
      out.push_back({"holdings_column_sum",
                     "cross_holdings column " + std::to_string(j) +
                         " plus self_ownership sums to " + std::to_string(s) +
                         ", expected 1"});
  }
  if (detail::all_finite_nonnegative(net.cross_holdings) &&
      !(resolvent_rcond(net.cross_holdings) >= kSingularRcond))
    out.push_back({"resolvent_invertible", "(I - C) is singular"});
  return out;
}

inline std::vector<Violation> validate(const FailureSpec& fail,
                                       std::size_t n_institutions) {
  std::vector<Violation> out;
  const auto n = static_cast<Eigen::Index>(n_institutions);
  if (fail.critical_values.size() != n || fail.failure_magnitudes.size() != n) {
    out.push_back({"dimensions",
                   "failure_spec vectors must have length " +
                       std::to_string(n_institutions)});
    return out;
  }
  detail::check_entries(fail.critical_values, "critical_values", out);
  detail::check_entries(fail.failure_magnitudes, "failure_magnitudes", out);
  return out;
}

/// Draws a random network. Ownership columns are symmetric Dirichlet(1)
/// (normalized unit exponentials), self-ownership is uniform on (0.5, 1),
/// the remaining column mass is spread over the off-diagonal cross-holdings
/// by another Dirichlet draw, and prices are uniform on [price_low,
/// price_high]. Draw order: D column by column, then per institution its
/// self-ownership followed by its n-1 cross-holding weights, then prices.
inline FinancialNetwork generate_random_network(std::size_t n, std::size_t m,
                                                double price_low,
                                                double price_high,
                                                std::uint64_t seed) {
  if (n < 1 || m < 1)
    throw ParameterError("generate_random_network: n and m must be >= 1");
  if (!(price_low >= 0.0) || !(price_low <= price_high) ||
      !std::isfinite(price_high))
    throw ParameterError(
        "generate_random_network: need 0 <= price_low <= price_high");

  Rng rng(seed);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  FinancialNetwork net;
  net.ownership = Matrix::Zero(ni, mi);
  for (Eigen::Index k = 0; k < mi; ++k) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
      net.ownership(i, k) = rng.exponential();
      total += net.ownership(i, k);
    }
    net.ownership.col(k) /= total;
  }

  net.cross_holdings = Matrix::Zero(ni, ni);
  net.self_ownership = Vector::Ones(ni);
  if (n > 1) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      const double self = 0.5 + 0.5 * rng.uniform_open();
      net.self_ownership[j] = self;
      double total = 0.0;
      for (Eigen::Index i = 0; i < ni; ++i) {
        if (i == j) continue;
        net.cross_holdings(i, j) = rng.exponential();
        total += net.cross_holdings(i, j);
      }
      net.cross_holdings.col(j) *= (1.0 - self) / total;
    }
  }

  net.prices.resize(mi);
  for (Eigen::Index k = 0; k < mi; ++k)
    net.prices[k] = rng.uniform(price_low, price_high);

  // Column sums of C are below 1/2, so its spectral radius is as well.
  const double max_col = net.cross_holdings.colwise().sum().maxCoeff();
  if (!(max_col < 1.0))
    throw NumericError("generated cross-holdings have column sum >= 1");
  return net;
}

/// Copy of @p net with the listed asset prices set to zero (0-based indices).
inline FinancialNetwork perturb_prices(const FinancialNetwork& net,
                                       const std::set<std::size_t>& zeroed) {
  FinancialNetwork out = net;
  for (std::size_t k : zeroed) {
    if (k >= net.n_assets())
      throw ParameterError("perturb_prices: asset index " + std::to_string(k) +
                           " out of range (m = " +
                           std::to_string(net.n_assets()) + ")");
    out.prices[static_cast<Eigen::Index>(k)] = 0.0;
  }
  return out;
}

}  // namespace crashnet
