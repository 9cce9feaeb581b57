/// @file polynomial.hpp
/// @brief Sparse multilinear polynomials over binary (0/1) or spin (+-1)
/// variables.
/// @details A term is a sorted set of variable ids. Products are reduced as
/// they are formed: x*x = x for binary variables and s*s = 1 for spins, so
/// no stored term ever repeats a variable. Terms live in an ordered map,
/// which makes iteration order (and every dump) deterministic.

#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "crashnet/error.hpp"

namespace crashnet {

using VarId = std::uint32_t;
using Monomial = std::vector<VarId>;

inline constexpr std::size_t kDefaultTermCap = 5'000'000;

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (VarId v : m) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    h ^= m.size();
    return static_cast<std::size_t>(h);
  }
};

/// x^2 = x: the product keeps the union of the variables.
struct BooleanDomain {
  static constexpr const char* name = "boolean";
  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
  }
  static Monomial normalize(Monomial m) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
  }
  /// Term value for an assignment given as bits.
  static double term_value(const Monomial& m, std::span<const std::uint8_t> x) {
    for (VarId v : m)
      if (!x[v]) return 0.0;
    return 1.0;
  }
};

/// s^2 = 1: repeated spins cancel pairwise.
struct SpinDomain {
  static constexpr const char* name = "spin";
  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
  }
  static Monomial normalize(Monomial m) {
    std::sort(m.begin(), m.end());
    Monomial out;
    for (std::size_t i = 0; i < m.size();) {
      std::size_t j = i;
      while (j < m.size() && m[j] == m[i]) ++j;
      if ((j - i) % 2 == 1) out.push_back(m[i]);
      i = j;
    }
    return out;
  }
  /// Bit 1 is spin +1, bit 0 is spin -1.
  static double term_value(const Monomial& m, std::span<const std::uint8_t> x) {
    bool negative = false;
    for (VarId v : m)
      if (!x[v]) negative = !negative;
    return negative ? -1.0 : 1.0;
  }
};

/// Meaning of a variable id: a bit of an institution's encoded market value,
/// or an ancilla introduced by quadratization.
struct VariableLabel {
  bool ancilla = false;
  int institution = -1;
  int exponent = 0;
};

template <class Domain>
class MultilinearPolynomial {
 public:
  using Terms = std::map<Monomial, double>;

  MultilinearPolynomial() = default;
  explicit MultilinearPolynomial(std::size_t num_variables)
      : num_variables_(num_variables) {}

  static MultilinearPolynomial constant(double c, std::size_t num_variables = 0) {
    MultilinearPolynomial p(num_variables);
    p.add_term({}, c);
    return p;
  }

  /// Adds c * prod(vars); vars need not be sorted or distinct.
  void add_term(Monomial vars, double c) {
    Monomial m = Domain::normalize(std::move(vars));
    if (!m.empty()) num_variables_ = std::max<std::size_t>(num_variables_, m.back() + 1);
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  std::size_t num_variables() const { return num_variables_; }
  void set_num_variables(std::size_t n) {
    if (!terms_.empty() && !terms_.rbegin()->first.empty()) {
      VarId hi = 0;
      for (const auto& [m, c] : terms_)
        if (!m.empty()) hi = std::max(hi, m.back());
      if (n <= hi) throw ParameterError("set_num_variables: below largest id");
    }
    num_variables_ = n;
  }

  const std::vector<VariableLabel>& labels() const { return labels_; }
  void set_labels(std::vector<VariableLabel> labels) { labels_ = std::move(labels); }

  double constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? 0.0 : it->second;
  }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.size());
    return d;
  }

  /// Number of terms of each order; index 0 is the constant.
  std::vector<std::size_t> order_counts() const {
    std::vector<std::size_t> counts(degree() + 1, 0);
    for (const auto& [m, c] : terms_) ++counts[m.size()];
    return counts;
  }

  double max_abs_coefficient() const {
    double mx = 0.0;
    for (const auto& [m, c] : terms_) mx = std::max(mx, std::abs(c));
    return mx;
  }

  MultilinearPolynomial& operator+=(const MultilinearPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    num_variables_ = std::max(num_variables_, o.num_variables_);
    return *this;
  }

  MultilinearPolynomial& operator-=(const MultilinearPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    num_variables_ = std::max(num_variables_, o.num_variables_);
    return *this;
  }

  MultilinearPolynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend MultilinearPolynomial operator+(MultilinearPolynomial a,
                                         const MultilinearPolynomial& b) {
    return a += b;
  }
  friend MultilinearPolynomial operator-(MultilinearPolynomial a,
                                         const MultilinearPolynomial& b) {
    return a -= b;
  }
  friend MultilinearPolynomial operator*(MultilinearPolynomial a, double s) {
    return a *= s;
  }
  friend MultilinearPolynomial operator*(double s, MultilinearPolynomial a) {
    return a *= s;
  }

  /// Distributive product with immediate reduction and merging. Throws
  /// ResourceError once the result would exceed @p term_cap terms.
  MultilinearPolynomial multiply(const MultilinearPolynomial& o,
                                 std::size_t term_cap = kDefaultTermCap) const {
    std::unordered_map<Monomial, double, MonomialHash> acc;
    acc.reserve(std::min(term_cap, terms_.size() * o.terms_.size() + 1));
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        acc[Domain::multiply(ma, mb)] += ca * cb;
        if (acc.size() > term_cap)
          throw ResourceError("polynomial product exceeds the term cap of " +
                              std::to_string(term_cap) + " terms");
      }
    MultilinearPolynomial out(std::max(num_variables_, o.num_variables_));
    for (auto& [m, c] : acc)
      if (c != 0.0) out.terms_.emplace(m, c);
    return out;
  }

  friend MultilinearPolynomial operator*(const MultilinearPolynomial& a,
                                         const MultilinearPolynomial& b) {
    return a.multiply(b);
  }

  /// Drops terms with |c| < relative_tolerance * max|c|; returns how many.
  std::size_t prune(double relative_tolerance = 1e-12) {
    const double cut = relative_tolerance * max_abs_coefficient();
    std::size_t removed = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < cut) {
        it = terms_.erase(it);
        ++removed;
      } else {
        ++it;
      }
    }
    return removed;
  }

  /// Evaluates at a 0/1 assignment (for spins, 1 means +1 and 0 means -1).
  double evaluate(std::span<const std::uint8_t> assignment) const {
    if (assignment.size() < num_variables_)
      throw ParameterError("evaluate: assignment covers " +
                           std::to_string(assignment.size()) + " of " +
                           std::to_string(num_variables_) + " variables");
    double sum = 0.0;
    for (const auto& [m, c] : terms_) sum += c * Domain::term_value(m, assignment);
    return sum;
  }

  /// One term per line: coefficient (17 significant digits), two spaces, ids.
  std::string dump() const {
    std::ostringstream os;
    char buf[40];
    for (const auto& [m, c] : terms_) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      os << buf;
      if (!m.empty()) os << ' ';
      for (VarId v : m) os << ' ' << v;
      os << '\n';
    }
    return os.str();
  }

  friend bool operator==(const MultilinearPolynomial& a,
                         const MultilinearPolynomial& b) {
    return a.terms_ == b.terms_;
  }

 private:
  Terms terms_;
  std::size_t num_variables_ = 0;
  std::vector<VariableLabel> labels_;
};

using BinaryPolynomial = MultilinearPolynomial<BooleanDomain>;
using SpinPolynomial = MultilinearPolynomial<SpinDomain>;

}  // namespace crashnet
