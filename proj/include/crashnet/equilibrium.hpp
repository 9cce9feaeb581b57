/// @file equilibrium.hpp
/// @brief Classical reference computations on a financial network.
/// @details Market values satisfy v = C~ (I - C)^{-1} (D p - b(v)), where the
/// failure vector b_i = beta_i (1 - Theta(v_i - v_c,i)) switches on once an
/// institution falls below its critical value. The boundary convention is
/// Theta(0) = 1: sitting exactly at the critical value is not a failure.

#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crashnet/legendre.hpp"
#include "crashnet/network.hpp"

namespace crashnet {

struct MarketState {
  Vector market_values;  ///< v = C~ V
  Vector equity_values;  ///< V = (I - C)^{-1} (D p - b)
};

/// Precomputed operator M = C~ (I - C)^{-1} and baseline u = M D p.
class EquilibriumOperator {
 public:
  explicit EquilibriumOperator(const FinancialNetwork& net)
      : solver_(net.cross_holdings),
        self_(net.self_ownership),
        asset_values_(net.asset_values()) {
    map_ = self_.asDiagonal() * solver_.inverse();
    baseline_ = map_ * asset_values_;
  }

  const Matrix& map() const { return map_; }
  const Vector& baseline() const { return baseline_; }
  const Vector& asset_values() const { return asset_values_; }
  const ResolventSolver& solver() const { return solver_; }
  std::size_t size() const { return static_cast<std::size_t>(self_.size()); }

  /// Equity and market values for a given failure vector.
  MarketState state(const Vector& failure) const {
    MarketState s;
    s.equity_values = solver_.solve(asset_values_ - failure);
    s.market_values = self_.cwiseProduct(s.equity_values);
    return s;
  }

 private:
  ResolventSolver solver_;
  Vector self_;
  Vector asset_values_;
  Matrix map_;
  Vector baseline_;
};

/// Failure-free equilibrium V = (I - C)^{-1} D p, v = C~ V.
inline MarketState linear_equilibrium(const FinancialNetwork& net) {
  const ResolventSolver solver(net.cross_holdings);
  const Vector dp = net.asset_values();
  MarketState s;
  s.equity_values = solver.solve(dp);
  s.market_values = net.self_ownership.cwiseProduct(s.equity_values);

  const Vector residual = s.equity_values - net.cross_holdings * s.equity_values - dp;
  const double scale = std::max(dp.lpNorm<Eigen::Infinity>(), 1e-300);
  if (residual.lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    throw NumericError("linear_equilibrium: residual " +
                       std::to_string(residual.lpNorm<Eigen::Infinity>()) +
                       " exceeds tolerance (rcond " +
                       std::to_string(solver.rcond()) + ")");
  return s;
}

namespace detail {
inline void require_length(const Vector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n)
    throw ParameterError(std::string(what) + ": expected length " +
                         std::to_string(n) + ", got " +
                         std::to_string(v.size()));
}
}  // namespace detail

/// Exact Heaviside failure vector.
inline Vector failure_vector(const FailureSpec& fail, const Vector& v) {
  const auto n = static_cast<std::size_t>(fail.critical_values.size());
  detail::require_length(v, n, "failure_vector");
  detail::require_length(fail.failure_magnitudes, n, "failure_vector");
  Vector b(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    b[i] = v[i] >= fail.critical_values[i] ? 0.0 : fail.failure_magnitudes[i];
  return b;
}

/// Legendre-smoothed failure vector: beta_i (1 - T_r((v_i - v_c,i) / v_max)).
inline Vector smoothed_failure_vector(const FailureSpec& fail,
                                      const ThetaPolynomial& theta,
                                      double v_max, const Vector& v) {
  Vector b(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    b[i] = fail.failure_magnitudes[i] *
           (1.0 - theta.evaluate_extended((v[i] - fail.critical_values[i]) /
                                          v_max));
  return b;
}

/// ||v - M (D p - b(v))||^2 with the exact Heaviside.
inline double objective(const FinancialNetwork& net, const FailureSpec& fail,
                        const Vector& v) {
  detail::require_length(v, net.n_institutions(), "objective");
  const ResolventSolver solver(net.cross_holdings);
  const Vector target = net.self_ownership.cwiseProduct(
      solver.solve(net.asset_values() - failure_vector(fail, v)));
  return (v - target).squaredNorm();
}

/// Same objective with the degree-r smoothed step and normalization v_max.
inline double smoothed_objective(const FinancialNetwork& net,
                                 const FailureSpec& fail, const Vector& v,
                                 int r, double v_max) {
  detail::require_length(v, net.n_institutions(), "smoothed_objective");
  const ThetaPolynomial theta = theta_coefficients(r);
  const ResolventSolver solver(net.cross_holdings);
  const Vector target = net.self_ownership.cwiseProduct(solver.solve(
      net.asset_values() - smoothed_failure_vector(fail, theta, v_max, v)));
  return (v - target).squaredNorm();
}

/// v_c = vc_fraction * v_linear, beta = beta_fraction * V_linear, taken from
/// the failure-free equilibrium of @p net.
inline FailureSpec default_failure_spec(const FinancialNetwork& net,
                                        double vc_fraction = 0.8,
                                        double beta_fraction = 0.3) {
  if (!(vc_fraction >= 0.0 && vc_fraction <= 1.0) ||
      !(beta_fraction >= 0.0 && beta_fraction <= 1.0))
    throw ParameterError("failure fractions must lie in [0, 1]");
  const MarketState s = linear_equilibrium(net);
  return {vc_fraction * s.market_values, beta_fraction * s.equity_values};
}

struct GridEquilibrium {
  Vector market_values;
  double objective = 0.0;
};

struct ExhaustiveEquilibrium {
  /// Every global minimizer (within the tie tolerance), lowest total market
  /// value first, then lexicographic.
  std::vector<GridEquilibrium> minimizers;
  double best_objective = 0.0;
  std::uint64_t evaluations = 0;
  std::uint64_t grid_points_per_institution = 0;
};

struct GridSearchOptions {
  bool use_smoothed = false;
  int degree = 3;
  std::uint64_t max_evaluations = std::uint64_t{1} << 25;
  double tie_tolerance = 1e-9;
};

/// Scans every integer grid point v in {0 .. 2^bits - 1}^n. With
/// use_smoothed the normalization is v_max = 2^bits - 1.
inline ExhaustiveEquilibrium exhaustive_equilibrium(
    const FinancialNetwork& net, const FailureSpec& fail, int bits,
    const GridSearchOptions& opt = {}) {
  const std::size_t n = net.n_institutions();
  if (bits < 1 || bits > 30)
    throw ParameterError("exhaustive_equilibrium: bits must be in [1, 30]");
  detail::require_length(fail.critical_values, n, "exhaustive_equilibrium");
  detail::require_length(fail.failure_magnitudes, n, "exhaustive_equilibrium");
  const std::uint64_t levels = std::uint64_t{1} << bits;
  long double required = 1.0L;
  for (std::size_t i = 0; i < n; ++i) required *= static_cast<long double>(levels);
  if (required > static_cast<long double>(opt.max_evaluations))
    throw ResourceError("exhaustive_equilibrium: " +
                        std::to_string(static_cast<double>(required)) +
                        " evaluations required, cap is " +
                        std::to_string(opt.max_evaluations));

  const EquilibriumOperator op(net);
  const Matrix& map = op.map();
  const Vector& u = op.baseline();
  const double v_max = static_cast<double>(levels - 1);

  // failure[j][g] = b_j at grid value g
  std::vector<std::vector<double>> failure(n, std::vector<double>(levels));
  std::optional<ThetaPolynomial> theta;
  if (opt.use_smoothed) theta = theta_coefficients(opt.degree);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::uint64_t g = 0; g < levels; ++g) {
      const double v = static_cast<double>(g);
      if (theta)
        failure[j][g] = fail.failure_magnitudes[jj] *
                        (1.0 - theta->evaluate_extended(
                                   (v - fail.critical_values[jj]) / v_max));
      else
        failure[j][g] = v >= fail.critical_values[jj]
                            ? 0.0
                            : fail.failure_magnitudes[jj];
    }
  }

  ExhaustiveEquilibrium out;
  out.grid_points_per_institution = levels;
  std::vector<std::uint64_t> idx(n, 0);
  std::vector<std::vector<std::uint64_t>> best_points;
  double best = std::numeric_limits<double>::infinity();
  const auto total = static_cast<std::uint64_t>(required);
  Vector b(static_cast<Eigen::Index>(n));
  for (std::uint64_t e = 0; e < total; ++e) {
    for (std::size_t j = 0; j < n; ++j)
      b[static_cast<Eigen::Index>(j)] = failure[j][idx[j]];
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double r = static_cast<double>(idx[i]) - u[ii];
      for (std::size_t j = 0; j < n; ++j)
        r += map(ii, static_cast<Eigen::Index>(j)) * b[static_cast<Eigen::Index>(j)];
      obj += r * r;
    }
    const double tol = opt.tie_tolerance * (1.0 + std::abs(best));
    if (obj < best - tol) {
      best = obj;
      best_points.clear();
      best_points.push_back(idx);
    } else if (obj <= best + tol) {
      best = std::min(best, obj);
      best_points.push_back(idx);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (++idx[j] < levels) break;
      idx[j] = 0;
    }
  }
  out.evaluations = total;
  out.best_objective = best;

  // Recheck ties against the final best (the running best only decreases).
  std::vector<GridEquilibrium> result;
  const double tol = opt.tie_tolerance * (1.0 + std::abs(best));
  for (const auto& p : best_points) {
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      v[static_cast<Eigen::Index>(j)] = static_cast<double>(p[j]);
    for (std::size_t j = 0; j < n; ++j)
      b[static_cast<Eigen::Index>(j)] = failure[j][p[j]];
    const double obj = (v - u + map * b).squaredNorm();
    if (obj <= best + tol) result.push_back({v, obj});
  }
  std::sort(result.begin(), result.end(),
            [](const GridEquilibrium& a, const GridEquilibrium& b) {
              const double sa = a.market_values.sum();
              const double sb = b.market_values.sum();
              if (sa != sb) return sa < sb;
              return std::lexicographical_compare(
                  a.market_values.begin(), a.market_values.end(),
                  b.market_values.begin(), b.market_values.end());
            });
  out.minimizers = std::move(result);
  return out;
}

struct CascadeResult {
  Vector market_values;
  bool converged = false;
  std::size_t steps = 0;  ///< index of the returned iterate
};

/// Fixed-point iteration v <- M (D p - b(v)) with the exact Heaviside.
/// Converged means an exact repeat: F(v_t) == v_t bit for bit.
inline CascadeResult cascade_iteration(const FinancialNetwork& net,
                                       const FailureSpec& fail,
                                       const Vector& start,
                                       std::size_t max_iter) {
  if (max_iter < 1) throw ParameterError("cascade_iteration: max_iter must be >= 1");
  detail::require_length(start, net.n_institutions(), "cascade_iteration");
  const EquilibriumOperator op(net);
  CascadeResult res;
  Vector v = start;
  for (std::size_t t = 0; t < max_iter; ++t) {
    Vector next = op.state(failure_vector(fail, v)).market_values;
    if (next == v) {
      res.market_values = v;
      res.converged = true;
      res.steps = t;
      return res;
    }
    v = std::move(next);
  }
  res.market_values = v;
  res.steps = max_iter;
  return res;
}

struct CrashReport {
  std::set<std::size_t> failed;  ///< institutions with v_after < v_c
  Vector drops;                  ///< v_after - v_before
  Vector relative_drops;         ///< drops / v_before (0 where v_before = 0)
  bool cascade = false;
};

/// @p linear_after is the failure-free market value under the new prices.
/// The report flags a cascade when an institution failed although its
/// price-only value stayed at or above the threshold.
inline CrashReport crash_report(const Vector& v_before, const Vector& v_after,
                                const FailureSpec& fail,
                                const std::optional<Vector>& linear_after = {}) {
  const auto n = static_cast<std::size_t>(v_before.size());
  detail::require_length(v_after, n, "crash_report");
  detail::require_length(fail.critical_values, n, "crash_report");
  if (linear_after) detail::require_length(*linear_after, n, "crash_report");
  CrashReport rep;
  rep.drops = v_after - v_before;
  rep.relative_drops = Vector::Zero(v_before.size());
  for (Eigen::Index i = 0; i < v_before.size(); ++i) {
    if (v_before[i] != 0.0) rep.relative_drops[i] = rep.drops[i] / v_before[i];
    if (v_after[i] < fail.critical_values[i]) {
      rep.failed.insert(static_cast<std::size_t>(i));
      if (linear_after && (*linear_after)[i] >= fail.critical_values[i])
        rep.cascade = true;
    }
  }
  return rep;
}

}  // namespace crashnet
