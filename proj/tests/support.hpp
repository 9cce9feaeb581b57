// Shared helpers for the test suites. Oracles here avoid the library's own
// machinery: plain loops over all assignments and closed-form formulas.
#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "crashnet/crashnet.hpp"

namespace testing_support {

using namespace crashnet;

inline std::vector<std::uint8_t> bits_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

/// Direct energy: offset + sum l_i x_i + sum Q_ij x_i x_j.
inline double plain_energy(const Qubo& q, const std::vector<std::uint8_t>& x) {
  double e = q.offset();
  for (std::size_t i = 0; i < q.size(); ++i) e += q.linear()[i] * x[i];
  for (const auto& [ij, v] : q.quadratic()) e += v * x[ij.first] * x[ij.second];
  return e;
}

struct BruteResult {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> argmin;
};

/// Every assignment in Gray-code order with a dense coupling matrix.
inline BruteResult brute_force(const Qubo& q, double tol = 1e-9) {
  BruteResult r;
  const std::size_t n = q.size();
  std::vector<double> w(n * n, 0.0);
  for (const auto& [ij, v] : q.quadratic()) {
    w[ij.first * n + ij.second] += v;
    w[ij.second * n + ij.first] += v;
  }
  std::vector<double> all(std::size_t{1} << n);
  std::vector<std::uint8_t> x(n, 0);
  double e = q.offset();
  all[0] = e;
  std::uint64_t gray = 0;
  for (std::uint64_t t = 1; t < all.size(); ++t) {
    std::size_t k = 0;
    while (!((t >> k) & 1u)) ++k;
    double d = q.linear()[k];
    for (std::size_t j = 0; j < n; ++j) d += w[k * n + j] * x[j];
    e += x[k] ? -d : d;
    x[k] ^= 1u;
    gray ^= std::uint64_t{1} << k;
    all[gray] = e;
  }
  for (double v : all) r.best = std::min(r.best, v);
  for (std::uint64_t m = 0; m < all.size(); ++m)
    if (all[m] <= r.best + tol * (1 + std::abs(r.best))) r.argmin.push_back(m);
  return r;
}

/// Random Qubo with coefficients in [-1, 1]; density is the coupler fraction.
inline Qubo random_qubo(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  Qubo q(n);
  for (std::size_t i = 0; i < n; ++i) q.add_linear(static_cast<VarId>(i), u(g));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(g) < density) q.add_quadratic(static_cast<VarId>(i), static_cast<VarId>(j), u(g));
  return q;
}

/// Random binary polynomial of order <= max_order on n variables.
inline BinaryPolynomial random_hubo(std::size_t n, std::size_t max_order, std::size_t terms,
                                    std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> order(1, max_order);
  BinaryPolynomial p(n);
  for (std::size_t t = 0; t < terms; ++t) {
    const std::size_t k = std::min(order(g), n);
    std::vector<VarId> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<VarId>(i);
    std::shuffle(pool.begin(), pool.end(), g);
    p.add_term(Monomial(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)), u(g));
  }
  p.add_term({}, u(g));
  return p;
}

/// T_3 in closed form: 1/2 + x/2 - (5x^3 - 3x)/16.
inline double theta3_closed(double x) { return 0.5 + 0.5 * x - (5 * x * x * x - 3 * x) / 16.0; }

/// Paper-shaped instance: three institutions, seven assets at the published
/// pre-perturbation prices, seeded D and C.
inline FinancialNetwork paper_shaped_network(std::uint64_t seed) {
  FinancialNetwork net = generate_random_network(3, 7, 10.0, 40.0, seed);
  const double p[] = {8.43, 14.47, 6.75, 8.09, 19.11, 11.32, 7.19};
  for (int k = 0; k < 7; ++k) net.prices[k] = p[k];
  return net;
}

}  // namespace testing_support
