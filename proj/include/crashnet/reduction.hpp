/// @file reduction.hpp
/// @brief Spin/boolean change of variables and quadratization of k-body
/// spin terms with ancilla gadgets.
/// @details The k-ancilla gadget for J_k s_1...s_k is
/// \f[ J\sum_{i<j} s_i s_j + h\sum_i s_i + J^a \sum_{i,j} s_i a_j + \sum_j h^a_j a_j \f]
/// with J = J^a, h = q_0 - J^a, h^a_j = q_j - J^a (2j - k) and
/// q_j = (-1)^{k-j+1} J_k + q_0 (1-based j). Minimizing over the ancillas
/// leaves J_k prod s_i plus a constant whenever |J_k| < q_0 < J^a and
/// |J_k| < J^a - q_0. Every emitted gadget is certified by brute force and
/// the certified constant is folded back into the problem offset, so the
/// ancilla-minimized QUBO energy equals the original polynomial exactly.

#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "crashnet/error.hpp"
#include "crashnet/polynomial.hpp"
#include "crashnet/qubo.hpp"

namespace crashnet {

/// x = (1 + s) / 2 for every variable; bit 1 pairs with spin +1.
inline SpinPolynomial boolean_to_spin(const BinaryPolynomial& bp) {
  SpinPolynomial sp(bp.num_variables());
  for (const auto& [m, c] : bp.terms()) {
    const std::size_t k = m.size();
    if (k > 30) throw ResourceError("boolean_to_spin: term of order " + std::to_string(k));
    const double w = std::ldexp(c, -static_cast<int>(k));
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      Monomial sub;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (1u << b)) sub.push_back(m[b]);
      sp.add_term(std::move(sub), w);
    }
  }
  sp.set_labels(bp.labels());
  return sp;
}

/// s = 2x - 1 for every variable.
inline BinaryPolynomial spin_to_boolean(const SpinPolynomial& sp) {
  BinaryPolynomial bp(sp.num_variables());
  for (const auto& [m, c] : sp.terms()) {
    const std::size_t k = m.size();
    if (k > 30) throw ResourceError("spin_to_boolean: term of order " + std::to_string(k));
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      Monomial sub;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (1u << b)) sub.push_back(m[b]);
      const int t = static_cast<int>(sub.size());
      const double sign = ((k - sub.size()) % 2 == 0) ? 1.0 : -1.0;
      bp.add_term(std::move(sub), sign * std::ldexp(c, t));
    }
  }
  bp.set_labels(sp.labels());
  return bp;
}

struct GadgetParams {
  double ja = 20.0;
  double q0 = 10.0;
  double scale_factor = 20.0;

  /// J^a = s |J_k|, q_0 = (s / 2) |J_k|.
  static GadgetParams scaled(double magnitude, double scale_factor = 20.0) {
    const double a = std::abs(magnitude);
    return {scale_factor * a, 0.5 * scale_factor * a, scale_factor};
  }

  /// |J_k| < q_0 < J^a and |J_k| < J^a - q_0 < J^a.
  void check(double jk) const {
    const double a = std::abs(jk);
    if (!(a < q0 && q0 < ja && a < ja - q0 && ja - q0 < ja))
      throw ParameterError("gadget parameters J^a = " + std::to_string(ja) +
                           ", q0 = " + std::to_string(q0) +
                           " violate |J_k| < q0 < J^a, |J_k| < J^a - q0 for J_k = " +
                           std::to_string(jk));
  }
};

/// Two-body replacement of one k-body term.
struct Gadget {
  Monomial logical;
  std::vector<VarId> ancillas;
  SpinPolynomial terms;   ///< order <= 2
  double constant = 0.0;  ///< certified: min over ancillas = J_k prod s + constant
  GadgetKind kind = GadgetKind::k_ancilla;
};

struct GadgetCertificate {
  bool passed = false;
  double constant = 0.0;
  double spread = 0.0;      ///< max - min of the residual constant
  std::vector<int> witness; ///< logical spins where the residual deviates most
  /// min over ancillas of the emitted energy, indexed by logical bitmask
  /// (bit b set means variable b has spin +1).
  std::vector<double> min_energies;
  /// Energy of every state (logical bits low, ancilla bits high); only
  /// filled for gadgets with at most 8 variables.
  std::vector<double> energy_table;
};

inline constexpr std::size_t kMaxCertifiedVariables = 24;

/// Brute-force check that min over ancillas of @p emitted equals
/// jk * prod(logical spins) + const for every logical configuration. The
/// tolerance is relative to max(1, |jk|).
inline GadgetCertificate verify_gadget(std::span<const VarId> logical,
                                       std::span<const VarId> ancillas,
                                       const SpinPolynomial& emitted, double jk,
                                       double tolerance = 1e-9) {
  const std::size_t k = logical.size();
  const std::size_t a = ancillas.size();
  if (k + a > kMaxCertifiedVariables)
    throw ResourceError("verify_gadget: " + std::to_string(k + a) +
                        " variables exceed the brute-force bound of " +
                        std::to_string(kMaxCertifiedVariables));

  auto local_index = [&](VarId id) -> std::size_t {
    for (std::size_t i = 0; i < k; ++i)
      if (logical[i] == id) return i;
    for (std::size_t j = 0; j < a; ++j)
      if (ancillas[j] == id) return k + j;
    throw ParameterError("verify_gadget: term references variable " + std::to_string(id) +
                         " outside the gadget");
  };
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (const auto& [m, c] : emitted.terms()) {
    std::uint32_t mask = 0;
    for (VarId v : m) mask |= 1u << local_index(v);
    terms.emplace_back(mask, c);
  }
  const std::uint32_t all = (k + a == 32) ? ~0u : ((1u << (k + a)) - 1);
  auto energy = [&](std::uint32_t state) {
    double e = 0.0;
    for (const auto& [mask, c] : terms)
      e += (std::popcount(mask & ~state & all) % 2 == 0) ? c : -c;
    return e;
  };

  GadgetCertificate cert;
  const std::uint32_t n_logical = 1u << k;
  const std::uint32_t n_ancilla = 1u << a;
  cert.min_energies.resize(n_logical);
  if (k + a <= 8) cert.energy_table.resize(std::size_t{1} << (k + a));
  std::vector<double> residual(n_logical);
  for (std::uint32_t l = 0; l < n_logical; ++l) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t anc = 0; anc < n_ancilla; ++anc) {
      const std::uint32_t state = l | (anc << k);
      const double e = energy(state);
      if (!cert.energy_table.empty()) cert.energy_table[state] = e;
      best = std::min(best, e);
    }
    cert.min_energies[l] = best;
    const double parity = (std::popcount(l) % 2 == static_cast<int>(k % 2)) ? 1.0 : -1.0;
    residual[l] = best - jk * parity;
  }
  const auto [lo, hi] = std::minmax_element(residual.begin(), residual.end());
  cert.spread = *hi - *lo;
  cert.constant = residual[0];
  cert.passed = cert.spread <= tolerance * std::max(1.0, std::abs(jk));
  std::uint32_t worst = 0;
  for (std::uint32_t l = 0; l < n_logical; ++l)
    if (std::abs(residual[l] - residual[0]) > std::abs(residual[worst] - residual[0]))
      worst = l;
  for (std::size_t b = 0; b < k; ++b) cert.witness.push_back((worst >> b) & 1u ? 1 : -1);
  return cert;
}

namespace detail {
inline void certify_or_throw(Gadget& g, double jk, const char* name) {
  const auto cert = verify_gadget(g.logical, g.ancillas, g.terms, jk);
  if (!cert.passed)
    throw GadgetError(std::string(name) + " gadget for J_k = " + std::to_string(jk) +
                          " failed certification (spread " + std::to_string(cert.spread) + ")",
                      cert.witness, cert.energy_table);
  g.constant = cert.constant;
}
}  // namespace detail

/// k-ancilla gadget. Ancillas get ids first_ancilla .. first_ancilla + k - 1.
inline Gadget reduce_kbody_term(std::span<const VarId> variables, double jk,
                                const GadgetParams& params, VarId first_ancilla) {
  const std::size_t k = variables.size();
  if (k < 3) throw ParameterError("reduce_kbody_term: need k >= 3, got " + std::to_string(k));
  Gadget g;
  g.logical.assign(variables.begin(), variables.end());
  g.kind = GadgetKind::k_ancilla;
  if (jk == 0.0) return g;
  params.check(jk);

  const double ja = params.ja;
  const double q0 = params.q0;
  for (std::size_t j = 0; j < k; ++j) g.ancillas.push_back(first_ancilla + static_cast<VarId>(j));

  for (std::size_t i = 0; i < k; ++i) {
    g.terms.add_term({variables[i]}, q0 - ja);
    for (std::size_t j = i + 1; j < k; ++j) g.terms.add_term({variables[i], variables[j]}, ja);
    for (std::size_t j = 0; j < k; ++j) g.terms.add_term({variables[i], g.ancillas[j]}, ja);
  }
  const int ki = static_cast<int>(k);
  for (int j = 1; j <= ki; ++j) {
    const double sign = ((ki - j + 1) % 2 == 0) ? 1.0 : -1.0;
    const double qj = sign * jk + q0;
    g.terms.add_term({g.ancillas[static_cast<std::size_t>(j - 1)]}, qj - ja * (2 * j - ki));
  }
  detail::certify_or_throw(g, jk, "k-ancilla");
  return g;
}

/// Single-ancilla 3-body gadget: J = |J_3|, J^a = 2J, h = J_3, h^a = 2 J_3.
inline Gadget reduce_3body_single_ancilla(std::span<const VarId> variables, double j3,
                                          VarId ancilla) {
  if (variables.size() != 3)
    throw ParameterError("reduce_3body_single_ancilla: need exactly 3 variables");
  Gadget g;
  g.logical.assign(variables.begin(), variables.end());
  g.kind = GadgetKind::single_ancilla;
  if (j3 == 0.0) return g;
  g.ancillas.push_back(ancilla);
  const double coupling = std::abs(j3);
  for (std::size_t i = 0; i < 3; ++i) {
    g.terms.add_term({variables[i]}, j3);
    for (std::size_t j = i + 1; j < 3; ++j) g.terms.add_term({variables[i], variables[j]}, coupling);
    g.terms.add_term({variables[i], ancilla}, 2.0 * coupling);
  }
  g.terms.add_term({ancilla}, 2.0 * j3);
  detail::certify_or_throw(g, j3, "single-ancilla");
  return g;
}

enum class GadgetScaling {
  per_term,  ///< J^a, q_0 from each term's |J_k|
  global,    ///< one J^a, q_0 from the largest |J_k|
};

enum class GadgetStrategy {
  k_ancilla,
  single_ancilla_3body,  ///< single ancilla for 3-body terms, k-ancilla otherwise
};

struct QuadratizeOptions {
  double scale_factor = 20.0;
  GadgetScaling scaling = GadgetScaling::per_term;
  GadgetStrategy strategy = GadgetStrategy::k_ancilla;
};

struct QuadratizeStats {
  std::size_t logical = 0;
  std::size_t ancillas = 0;
  std::size_t couplers = 0;
  std::size_t linear_terms = 0;
  std::size_t reduced_terms = 0;
  std::size_t fallbacks = 0;
};

/// Replaces every term of order >= 3 by a certified gadget and converts the
/// result to the boolean QUBO convention. Ancillas are numbered after the
/// logical variables in lexicographic order of their source terms.
inline Qubo quadratize(const SpinPolynomial& sp, const QuadratizeOptions& opt = {},
                       QuadratizeStats* stats = nullptr) {
  const std::size_t logical = sp.num_variables();
  double global_scale = 0.0;
  for (const auto& [m, c] : sp.terms())
    if (m.size() >= 3) global_scale = std::max(global_scale, std::abs(c));

  std::vector<double> field(logical, 0.0);
  std::map<Coupler, double> coupling;
  double constant = 0.0;
  std::vector<std::pair<VarId, AncillaInfo>> registry;
  auto next_ancilla = static_cast<VarId>(logical);
  QuadratizeStats st;

  auto emit = [&](const Monomial& m, double c) {
    if (m.empty()) {
      constant += c;
    } else if (m.size() == 1) {
      if (m[0] >= field.size()) field.resize(m[0] + 1, 0.0);
      field[m[0]] += c;
    } else {
      coupling[{m[0], m[1]}] += c;
    }
  };

  for (const auto& [m, c] : sp.terms()) {
    if (m.size() <= 2) {
      emit(m, c);
      continue;
    }
    if (c == 0.0) continue;
    const GadgetParams params = opt.scaling == GadgetScaling::global
                                    ? GadgetParams::scaled(global_scale, opt.scale_factor)
                                    : GadgetParams::scaled(c, opt.scale_factor);
    std::optional<Gadget> g;
    GadgetKind kind = GadgetKind::k_ancilla;
    if (m.size() == 3 && opt.strategy == GadgetStrategy::single_ancilla_3body) {
      try {
        g = reduce_3body_single_ancilla(m, c, next_ancilla);
        kind = GadgetKind::single_ancilla;
      } catch (const GadgetError&) {
        kind = GadgetKind::k_ancilla_fallback;
        ++st.fallbacks;
      }
    }
    if (!g) g = reduce_kbody_term(m, c, params, next_ancilla);
    for (const auto& [gm, gc] : g->terms.terms()) emit(gm, gc);
    constant -= g->constant;
    for (VarId a : g->ancillas) registry.push_back({a, AncillaInfo{m, kind}});
    next_ancilla += static_cast<VarId>(g->ancillas.size());
    ++st.reduced_terms;
  }
  field.resize(next_ancilla, 0.0);

  // s = 2x - 1
  Qubo q(next_ancilla);
  q.add_offset(constant);
  for (std::size_t i = 0; i < field.size(); ++i) {
    q.add_linear(static_cast<VarId>(i), 2.0 * field[i]);
    q.add_offset(-field[i]);
  }
  for (const auto& [ij, c] : coupling) {
    if (c == 0.0) continue;
    q.add_quadratic(ij.first, ij.second, 4.0 * c);
    q.add_linear(ij.first, -2.0 * c);
    q.add_linear(ij.second, -2.0 * c);
    q.add_offset(c);
  }
  for (auto& [id, info] : registry) q.register_ancilla(id, std::move(info));

  st.logical = logical;
  st.ancillas = q.ancillas().size();
  st.couplers = q.quadratic().size();
  st.linear_terms = q.num_linear_nonzero();
  if (stats) *stats = st;
  return q;
}

using BigInt = boost::multiprecision::cpp_int;

struct ResourceEstimate {
  BigInt logical_variables;
  BigInt max_terms;        ///< sum_{a=0}^{2r} C(N, a), N = n * bits
  BigInt max_ancillas;     ///< sum_{k=3}^{2r} k C(N, k)
  BigInt qubo_side_bound;  ///< N + max_ancillas
  BigInt memory_bytes;     ///< 8 * side^2 for the dense double matrix
};

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

/// Dense double-precision QUBO matrix of the given side length.
inline BigInt qubo_memory_bytes(const BigInt& side) { return 8 * side * side; }

/// Upper bounds assuming the expanded objective contains every term up to
/// order 2r.
inline ResourceEstimate estimate_resources(std::uint64_t n, std::uint64_t bits,
                                           std::uint64_t r) {
  if (n < 1 || bits < 1)
    throw ParameterError("estimate_resources: n and bits must be positive");
  ResourceEstimate e;
  const std::uint64_t nvars = n * bits;
  e.logical_variables = nvars;
  for (std::uint64_t a = 0; a <= 2 * r; ++a) {
    const BigInt c = binomial(nvars, a);
    e.max_terms += c;
    if (a >= 3) e.max_ancillas += a * c;
  }
  e.qubo_side_bound = e.logical_variables + e.max_ancillas;
  e.memory_bytes = qubo_memory_bytes(e.qubo_side_bound);
  return e;
}

}  // namespace crashnet
