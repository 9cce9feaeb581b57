/// @file decompose.hpp
/// @brief Decomposition meta-solver for QUBOs too large for a direct solve.
/// @details Each read starts from a greedy descent of a random assignment.
/// A pass ranks the searchable variables by the magnitude of their flip
/// energy (largest first, index order among equals), perturbs the ranking
/// with a few seeded random swaps, and walks it in chunks of
/// subproblem_size. For each chunk every other variable is clamped, the
/// induced sub-QUBO is solved by the subsolver, the sub-solution is written
/// back and polished by greedy descent, and the result is kept only if the
/// energy strictly drops. A read ends after max_iterations sub-solves or a
/// pass without improvement.
///
/// With ancilla elimination on (see flip_model.hpp) chunks hold logical
/// variables only; the induced sub-QUBO then also carries every ancilla
/// attached to the chunk, together with its registry entry, so the
/// subsolver eliminates them as well.

#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "crashnet/solver/local.hpp"

namespace crashnet {

/// Clamped sub-problem: sub-QUBO over @c variables (full-problem ids, in
/// sub-index order). Sub energy equals full energy with the clamps applied.
struct SubProblem {
  Qubo qubo;
  std::vector<VarId> variables;
};

/// Builds the sub-QUBO over @p chunk with everything else clamped to @p x.
/// With @p with_ancillas, ancillas adjacent to the chunk join it.
inline SubProblem induced_subqubo(const Qubo& q, std::span<const VarId> chunk,
                                  std::span<const std::uint8_t> x, bool with_ancillas) {
  SubProblem sub;
  std::vector<std::int64_t> index(q.size(), -1);
  for (VarId v : chunk) {
    if (index[v] < 0) {
      index[v] = static_cast<std::int64_t>(sub.variables.size());
      sub.variables.push_back(v);
    }
  }
  if (with_ancillas) {
    std::vector<VarId> extra;
    for (const auto& [ij, w] : q.quadratic()) {
      const auto [i, j] = ij;
      if (index[i] >= 0 && index[j] < 0 && q.is_ancilla(j)) extra.push_back(j);
      if (index[j] >= 0 && index[i] < 0 && q.is_ancilla(i)) extra.push_back(i);
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    for (VarId a : extra) {
      index[a] = static_cast<std::int64_t>(sub.variables.size());
      sub.variables.push_back(a);
    }
  }

  Qubo out(sub.variables.size());
  double offset = q.offset();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (index[i] >= 0) out.add_linear(static_cast<VarId>(index[i]), q.linear()[i]);
    else if (x[i]) offset += q.linear()[i];
  }
  for (const auto& [ij, w] : q.quadratic()) {
    const auto [i, j] = ij;
    const bool in_i = index[i] >= 0;
    const bool in_j = index[j] >= 0;
    if (in_i && in_j) out.add_quadratic(static_cast<VarId>(index[i]), static_cast<VarId>(index[j]), w);
    else if (in_i && x[j]) out.add_linear(static_cast<VarId>(index[i]), w);
    else if (in_j && x[i]) out.add_linear(static_cast<VarId>(index[j]), w);
    else if (!in_i && !in_j && x[i] && x[j]) offset += w;
  }
  out.set_offset(offset);
  for (const auto& [id, info] : q.ancillas()) {
    if (index[id] < 0) continue;
    Monomial src;
    for (VarId v : info.source_term)
      if (index[v] >= 0) src.push_back(static_cast<VarId>(index[v]));
    if (src.empty()) src.push_back(static_cast<VarId>(index[id]));
    std::sort(src.begin(), src.end());
    out.register_ancilla(static_cast<VarId>(index[id]), {src, info.kind});
  }
  sub.qubo = std::move(out);
  return sub;
}

enum class Subsolver { exhaustive, anneal, tabu, custom };

/// Solves a sub-QUBO; the seed is derived per sub-solve.
using SubsolverFn = std::function<SampleSet(const Qubo&, std::uint64_t seed)>;

struct DecomposeOptions {
  std::size_t subproblem_size = 50;
  Subsolver subsolver = Subsolver::tabu;
  std::size_t max_iterations = 200;  ///< sub-solves per read
  std::size_t reads = 20;
  std::uint64_t seed = 0;
  double swap_fraction = 0.1;
  bool eliminate_ancillas = true;
  std::size_t threads = 1;
  TabuOptions tabu;                       ///< for Subsolver::tabu
  std::optional<AnnealSchedule> anneal;   ///< for Subsolver::anneal; defaults per sub-QUBO
  SubsolverFn custom;                     ///< for Subsolver::custom
  /// Called with (read, incumbent energy) after the start and every accepted step.
  std::function<void(std::size_t, double)> on_incumbent;
};

namespace detail {

inline SampleSet run_subsolver(const Qubo& sub, const DecomposeOptions& opt,
                               std::uint64_t seed) {
  LocalSearchOptions local{opt.eliminate_ancillas, 1};
  switch (opt.subsolver) {
    case Subsolver::exhaustive: {
      ExhaustiveSolveOptions eo;
      eo.eliminate_ancillas = opt.eliminate_ancillas;
      eo.max_stored_minimizers = 1;
      return exhaustive_solve(sub, eo);
    }
    case Subsolver::anneal: {
      AnnealSchedule s = opt.anneal ? *opt.anneal : AnnealSchedule::defaults_for(sub);
      if (!opt.anneal) s.reads = 1;
      return simulated_annealing(sub, s, seed, local);
    }
    case Subsolver::tabu:
      return tabu_solve(sub, opt.tabu, seed, local);
    case Subsolver::custom:
      if (!opt.custom) throw ParameterError("decompose_solve: custom subsolver not set");
      return opt.custom(sub, seed);
  }
  throw ParameterError("decompose_solve: unknown subsolver");
}

}  // namespace detail

inline SampleSet decompose_solve(const Qubo& q, const DecomposeOptions& opt = {}) {
  if (opt.subproblem_size < 2) throw ParameterError("decompose_solve: subproblem_size must be >= 2");
  if (opt.reads < 1) throw ParameterError("decompose_solve: reads must be >= 1");
  Stopwatch clock;
  const QuboGraph g(q, opt.eliminate_ancillas);
  const std::size_t n = g.movable().size();
  const double tol = g.tolerance();
  std::vector<std::size_t> iterations(opt.reads, 0);

  auto read = [&](std::size_t r) {
    Rng rng(mix_seed(opt.seed, r));
    FlipState state(g);
    state.randomize(rng);
    greedy_descent(state, tol);
    double incumbent = state.energy();
    auto best_x = state.assignment();
    if (opt.on_incumbent) opt.on_incumbent(r, incumbent);
    if (n == 0) return best_x;

    const bool whole = opt.subproblem_size >= n;
    std::size_t iter = 0;
    bool improved = true;
    while (improved && iter < opt.max_iterations) {
      improved = false;
      std::vector<std::size_t> order(n);
      std::vector<double> impact(n);
      for (std::size_t k = 0; k < n; ++k) impact[k] = std::abs(state.delta(k));
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return impact[a] > impact[b]; });
      const auto swaps = static_cast<std::size_t>(std::ceil(opt.swap_fraction * double(n)));
      for (std::size_t s = 0; s < swaps && n > 1; ++s)
        std::swap(order[rng.below(n)], order[rng.below(n)]);

      for (std::size_t start = 0; start < n && iter < opt.max_iterations;
           start += opt.subproblem_size) {
        std::vector<VarId> chunk;
        for (std::size_t k = start; k < std::min(n, start + opt.subproblem_size); ++k)
          chunk.push_back(g.movable()[order[k]]);
        std::sort(chunk.begin(), chunk.end());
        const SubProblem sub = induced_subqubo(q, chunk, state.assignment(), g.eliminates());
        SampleSet solved;
        try {
          solved = detail::run_subsolver(sub.qubo, opt, mix_seed(mix_seed(opt.seed, r), iter));
        } catch (const Error& e) {
          rethrow_with_context(e, "decompose_solve read " + std::to_string(r) + " iteration " +
                                      std::to_string(iter) + " (subproblem of " +
                                      std::to_string(sub.variables.size()) + " variables)");
        }
        ++iter;
        auto candidate = state.assignment();
        const auto& bits = solved.best_sample().assignment;
        for (std::size_t s = 0; s < sub.variables.size(); ++s) candidate[sub.variables[s]] = bits[s];
        FlipState trial(g);
        trial.assign(candidate);
        greedy_descent(trial, tol);
        if (trial.energy() < incumbent - tol) {
          state = trial;
          incumbent = trial.energy();
          best_x = state.assignment();
          improved = true;
          if (opt.on_incumbent) opt.on_incumbent(r, incumbent);
        }
      }
      if (whole) break;
    }
    iterations[r] = iter;
    return best_x;
  };

  auto reads = run_reads<std::vector<std::uint8_t>>(opt.reads, opt.threads, read);
  SolverMetadata meta;
  meta.solver = "decompose";
  meta.seed = opt.seed;
  meta.reads = opt.reads;
  for (auto it : iterations) meta.iterations += it;
  meta.extra["subproblem_size"] = static_cast<double>(opt.subproblem_size);
  meta.extra["ancillas_eliminated"] = g.eliminates() ? 1.0 : 0.0;
  meta.wall_time_seconds = clock.seconds();
  return make_sample_set(q, reads, "local", std::move(meta));
}

}  // namespace crashnet
