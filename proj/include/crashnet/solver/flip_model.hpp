/// @file flip_model.hpp
/// @brief Incremental single-flip views of a Qubo and the local-search
/// kernels that run on them.
/// @details FlipState either moves every variable or, with elimination,
/// moves only logical variables and keeps every ancilla at its conditional
/// optimum x_a = [f_a < 0], which is exact when no coupler
/// joins two ancillas (true for every gadget emitted by quadratize). A
/// logical flip then carries the re-optimization of all attached ancillas,
/// so the barrier a gadget puts between logical configurations disappears.

#pragma once
#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <vector>

#include "crashnet/qubo.hpp"
#include "crashnet/rng.hpp"

namespace crashnet {

struct Neighbor {
  VarId id;
  double weight;
};

/// Adjacency and metadata of a Qubo, built once per solve.
class QuboGraph {
 public:
  QuboGraph(const Qubo& q, bool eliminate_ancillas)
      : linear_(q.linear()),
        offset_(q.offset()),
        logical_nbrs_(q.size()),
        ancilla_nbrs_(q.size()),
        is_ancilla_(q.size(), 0) {
    for (const auto& [id, info] : q.ancillas()) is_ancilla_[id] = 1;
    eliminate_ = eliminate_ancillas && q.ancillas_independent();
    if (!eliminate_) std::fill(is_ancilla_.begin(), is_ancilla_.end(), 0);
    for (const auto& [ij, w] : q.quadratic()) {
      auto [i, j] = ij;
      (is_ancilla_[j] ? ancilla_nbrs_[i] : logical_nbrs_[i]).push_back({j, w});
      (is_ancilla_[i] ? ancilla_nbrs_[j] : logical_nbrs_[j]).push_back({i, w});
    }
    for (std::size_t i = 0; i < q.size(); ++i)
      if (!is_ancilla_[i]) movable_.push_back(static_cast<VarId>(i));
      else ancillas_.push_back(static_cast<VarId>(i));
    tolerance_ = 1e-12 * std::max(1.0, q.max_abs_coefficient());
  }

  std::size_t size() const { return linear_.size(); }
  bool eliminates() const { return eliminate_; }
  const std::vector<VarId>& movable() const { return movable_; }
  const std::vector<VarId>& ancillas() const { return ancillas_; }
  bool is_ancilla(VarId i) const { return is_ancilla_[i] != 0; }
  double linear(VarId i) const { return linear_[i]; }
  double offset() const { return offset_; }
  const std::vector<Neighbor>& logical_neighbors(VarId i) const { return logical_nbrs_[i]; }
  const std::vector<Neighbor>& ancilla_neighbors(VarId i) const { return ancilla_nbrs_[i]; }
  /// Energy changes below this are treated as zero.
  double tolerance() const { return tolerance_; }

 private:
  std::vector<double> linear_;
  double offset_;
  std::vector<std::vector<Neighbor>> logical_nbrs_;
  std::vector<std::vector<Neighbor>> ancilla_nbrs_;
  std::vector<std::uint8_t> is_ancilla_;
  std::vector<VarId> movable_;
  std::vector<VarId> ancillas_;
  bool eliminate_ = false;
  double tolerance_ = 1e-12;
};

/// Local fields for the movable variables, ancillas kept optimal when the
/// graph eliminates them. Without elimination every variable is movable
/// and the ancilla lists are empty, so the same code serves both cases.
class FlipState {
 public:
  explicit FlipState(const QuboGraph& g)
      : g_(&g), x_(g.size(), 0), field_(g.size(), 0.0) {
    recompute();
  }

  const QuboGraph& graph() const { return *g_; }
  std::size_t num_movable() const { return g_->movable().size(); }
  VarId movable(std::size_t k) const { return g_->movable()[k]; }
  const std::vector<std::uint8_t>& assignment() const { return x_; }
  double energy() const { return energy_; }

  /// Energy change of flipping movable variable k (ancillas re-optimized).
  double delta(std::size_t k) const {
    const VarId i = movable(k);
    const double s = x_[i] ? -1.0 : 1.0;
    double d = s * field_[i];
    for (const auto& [a, w] : g_->ancilla_neighbors(i)) {
      const double f = field_[a];
      d += std::min(0.0, f + s * w) - std::min(0.0, f);
    }
    return d;
  }

  void flip(std::size_t k) {
    const VarId i = movable(k);
    const double s = x_[i] ? -1.0 : 1.0;
    energy_ += delta(k);
    x_[i] ^= 1;
    for (const auto& [j, w] : g_->logical_neighbors(i)) field_[j] += s * w;
    for (const auto& [a, w] : g_->ancilla_neighbors(i)) {
      field_[a] += s * w;
      x_[a] = field_[a] < 0.0 ? 1 : 0;
    }
  }

  /// Sets the movable bits from a full assignment; ancillas are re-derived.
  void assign(const std::vector<std::uint8_t>& x) {
    for (VarId i : g_->movable()) x_[i] = x[i] ? 1 : 0;
    recompute();
  }

  void randomize(Rng& rng) {
    for (VarId i : g_->movable()) x_[i] = rng.coin() ? 1 : 0;
    recompute();
  }

  void recompute() {
    const QuboGraph& g = *g_;
    // Logical fields first: they do not depend on ancilla values.
    for (VarId i : g.movable()) {
      double f = g.linear(i);
      for (const auto& [j, w] : g.logical_neighbors(i))
        if (x_[j]) f += w;
      field_[i] = f;
    }
    for (VarId a : g.ancillas()) {
      double f = g.linear(a);
      for (const auto& [j, w] : g.logical_neighbors(a))
        if (x_[j]) f += w;
      field_[a] = f;
      x_[a] = f < 0.0 ? 1 : 0;
    }
    double e = g.offset();
    for (VarId i : g.movable())
      if (x_[i]) {
        e += g.linear(i);
        for (const auto& [j, w] : g.logical_neighbors(i))
          if (j > i && x_[j]) e += w;
      }
    for (VarId a : g.ancillas()) e += std::min(0.0, field_[a]);
    energy_ = e;
  }

 private:
  const QuboGraph* g_;
  std::vector<std::uint8_t> x_;
  std::vector<double> field_;
  double energy_ = 0.0;
};

template <class M>
concept FlipModel = requires(M m, const M cm, std::size_t k) {
  { cm.num_movable() } -> std::convertible_to<std::size_t>;
  { cm.delta(k) } -> std::convertible_to<double>;
  { cm.energy() } -> std::convertible_to<double>;
  m.flip(k);
};

/// Steepest descent until no flip lowers the energy by more than @p tol.
/// Returns the number of flips made.
template <FlipModel M>
std::size_t greedy_descent(M& m, double tol) {
  std::size_t flips = 0;
  const std::size_t n = m.num_movable();
  while (true) {
    std::size_t best = n;
    double best_delta = -tol;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = m.delta(k);
      if (d < best_delta) {
        best_delta = d;
        best = k;
      }
    }
    if (best == n) return flips;
    m.flip(best);
    ++flips;
  }
}

/// Single-flip Metropolis sweeps on a geometric temperature ladder, then a
/// final greedy descent. Leaves the model at the best state seen.
template <FlipModel M>
std::size_t anneal(M& m, double t_initial, double t_final, std::size_t sweeps, Rng& rng,
                   double tol) {
  const std::size_t n = m.num_movable();
  std::size_t flips = 0;
  double best = m.energy();
  auto best_x = m.assignment();
  for (std::size_t s = 0; s < sweeps; ++s) {
    const double frac = sweeps > 1 ? double(s) / double(sweeps - 1) : 1.0;
    const double t = t_initial * std::pow(t_final / t_initial, frac);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = m.delta(k);
      if (d <= 0.0 || rng.uniform() < std::exp(-d / t)) {
        m.flip(k);
        ++flips;
      }
    }
    if (m.energy() < best - tol) {
      best = m.energy();
      best_x = m.assignment();
    }
  }
  if (best < m.energy() - tol) m.assign(best_x);
  flips += greedy_descent(m, tol);
  return flips;
}

/// Steepest-descent tabu search with aspiration. Phase one descends to a
/// local minimum; phase two keeps taking the best admissible move until
/// @p max_no_improve consecutive moves fail to beat the incumbent. Leaves
/// the model at the incumbent; returns the number of moves.
template <FlipModel M>
std::size_t tabu_search(M& m, std::size_t tenure, std::size_t max_no_improve, double tol) {
  const std::size_t n = m.num_movable();
  std::size_t moves = greedy_descent(m, tol);
  if (max_no_improve == 0 || n == 0) return moves;

  double best = m.energy();
  auto best_x = m.assignment();
  std::vector<std::size_t> tabu_until(n, 0);
  const std::size_t hard_cap = 1000 * (n + max_no_improve);
  std::size_t no_improve = 0;
  for (std::size_t iter = 1; no_improve < max_no_improve && iter < hard_cap; ++iter) {
    std::size_t pick = n;
    double pick_delta = std::numeric_limits<double>::infinity();
    const double e = m.energy();
    for (std::size_t k = 0; k < n; ++k) {
      const double d = m.delta(k);
      const bool allowed = tabu_until[k] < iter || e + d < best - tol;
      if (allowed && d < pick_delta) {
        pick_delta = d;
        pick = k;
      }
    }
    if (pick == n) {
      // everything tabu: release the oldest
      pick = static_cast<std::size_t>(
          std::min_element(tabu_until.begin(), tabu_until.end()) - tabu_until.begin());
    }
    m.flip(pick);
    ++moves;
    tabu_until[pick] = iter + tenure;
    if (m.energy() < best - tol) {
      best = m.energy();
      best_x = m.assignment();
      no_improve = 0;
    } else {
      ++no_improve;
    }
  }
  if (best < m.energy() - tol) m.assign(best_x);
  return moves;
}

}  // namespace crashnet
