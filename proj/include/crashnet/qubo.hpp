/// @file qubo.hpp
/// @brief Two-body binary problem: minimize offset + sum_i l_i x_i +
/// sum_{i<j} Q_ij x_i x_j over x in {0,1}^size.

#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crashnet/error.hpp"
#include "crashnet/polynomial.hpp"

namespace crashnet {

enum class GadgetKind {
  k_ancilla,         ///< k ancillas for a k-body term
  single_ancilla,    ///< one ancilla for a 3-body term
  k_ancilla_fallback ///< single-ancilla gadget failed certification
};

inline const char* to_string(GadgetKind k) {
  switch (k) {
    case GadgetKind::k_ancilla: return "kbody";
    case GadgetKind::single_ancilla: return "single";
    case GadgetKind::k_ancilla_fallback: return "kbody_fallback";
  }
  return "unknown";
}

struct AncillaInfo {
  Monomial source_term;  ///< logical variables of the reduced term
  GadgetKind kind = GadgetKind::k_ancilla;
};

using Coupler = std::pair<VarId, VarId>;

class Qubo {
 public:
  Qubo() = default;
  explicit Qubo(std::size_t size) : linear_(size, 0.0) {}

  std::size_t size() const { return linear_.size(); }
  void resize(std::size_t size) {
    if (size < linear_.size()) throw ParameterError("Qubo::resize cannot shrink");
    linear_.resize(size, 0.0);
  }

  void add_linear(VarId i, double v) {
    check_index(i);
    linear_[i] += v;
  }

  /// Adds v * x_i * x_j; i == j folds into the linear term.
  void add_quadratic(VarId i, VarId j, double v) {
    check_index(i);
    check_index(j);
    if (i == j) {
      linear_[i] += v;
      return;
    }
    if (v == 0.0) return;
    const Coupler key = i < j ? Coupler{i, j} : Coupler{j, i};
    auto [it, inserted] = quadratic_.try_emplace(key, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0.0) quadratic_.erase(it);
    }
  }

  void add_offset(double v) { offset_ += v; }
  void set_offset(double v) { offset_ = v; }

  const std::vector<double>& linear() const { return linear_; }
  const std::map<Coupler, double>& quadratic() const { return quadratic_; }
  double offset() const { return offset_; }

  void register_ancilla(VarId id, AncillaInfo info) {
    check_index(id);
    if (info.source_term.empty())
      throw ParameterError("ancilla " + std::to_string(id) + " needs a source term");
    ancillas_[id] = std::move(info);
  }
  const std::map<VarId, AncillaInfo>& ancillas() const { return ancillas_; }
  bool is_ancilla(VarId id) const { return ancillas_.count(id) != 0; }
  std::size_t num_logical() const { return size() - ancillas_.size(); }

  std::size_t num_linear_nonzero() const {
    return static_cast<std::size_t>(
        std::count_if(linear_.begin(), linear_.end(), [](double v) { return v != 0.0; }));
  }

  double energy(std::span<const std::uint8_t> x) const {
    if (x.size() != size())
      throw ParameterError("Qubo::energy: assignment has " + std::to_string(x.size()) +
                           " entries, expected " + std::to_string(size()));
    double e = offset_;
    for (std::size_t i = 0; i < linear_.size(); ++i)
      if (x[i]) e += linear_[i];
    for (const auto& [ij, v] : quadratic_)
      if (x[ij.first] && x[ij.second]) e += v;
    return e;
  }

  double max_abs_coefficient() const {
    double mx = 0.0;
    for (double v : linear_) mx = std::max(mx, std::abs(v));
    for (const auto& [ij, v] : quadratic_) mx = std::max(mx, std::abs(v));
    return mx;
  }

  /// True when no coupler joins two ancillas. Ancillas can then be minimized
  /// one by one in closed form once the logical bits are fixed.
  bool ancillas_independent() const {
    if (ancillas_.empty()) return false;
    for (const auto& [ij, v] : quadratic_)
      if (is_ancilla(ij.first) && is_ancilla(ij.second)) return false;
    return true;
  }

  /// Structural invariants; empty when all hold.
  std::vector<std::string> check() const {
    std::vector<std::string> out;
    for (const auto& [ij, v] : quadratic_) {
      if (ij.first >= ij.second) out.push_back("coupler is not ordered i < j");
      if (ij.second >= size()) out.push_back("coupler index out of range");
      if (!std::isfinite(v)) out.push_back("non-finite coupler");
    }
    for (double v : linear_)
      if (!std::isfinite(v)) out.push_back("non-finite linear coefficient");
    for (const auto& [id, info] : ancillas_) {
      if (id >= size()) out.push_back("ancilla index out of range");
      if (info.source_term.empty()) out.push_back("ancilla without source term");
    }
    return out;
  }

  friend bool operator==(const Qubo& a, const Qubo& b) {
    return a.linear_ == b.linear_ && a.quadratic_ == b.quadratic_ &&
           a.offset_ == b.offset_;
  }

 private:
  void check_index(VarId i) const {
    if (i >= linear_.size())
      throw ParameterError("Qubo: variable " + std::to_string(i) +
                           " out of range (size " + std::to_string(linear_.size()) + ")");
  }

  std::vector<double> linear_;
  std::map<Coupler, double> quadratic_;
  double offset_ = 0.0;
  std::map<VarId, AncillaInfo> ancillas_;
};

/// Qubo from a binary polynomial of degree <= 2 (no ancillas).
inline Qubo qubo_from_polynomial(const BinaryPolynomial& p) {
  if (p.degree() > 2)
    throw ParameterError("qubo_from_polynomial: degree " + std::to_string(p.degree()) +
                         " needs quadratization first");
  Qubo q(p.num_variables());
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) q.add_offset(c);
    else if (m.size() == 1) q.add_linear(m[0], c);
    else q.add_quadratic(m[0], m[1], c);
  }
  return q;
}

}  // namespace crashnet
