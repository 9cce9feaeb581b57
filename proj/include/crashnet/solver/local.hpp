/// @file local.hpp
/// @brief In-process QUBO solvers: exhaustive enumeration, simulated
/// annealing and tabu search.
/// @details When a Qubo carries an ancilla registry whose ancillas are
/// pairwise uncoupled, every solver searches over the logical variables only
/// and sets ancillas to their conditional optimum (see flip_model.hpp).
/// Pass eliminate_ancillas = false to search the raw variable space.

#pragma once
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "crashnet/rng.hpp"
#include "crashnet/solver/flip_model.hpp"
#include "crashnet/solver/sample_set.hpp"

namespace crashnet {

inline constexpr std::size_t kMaxExhaustiveVariables = 25;

struct ExhaustiveSolveOptions {
  bool eliminate_ancillas = true;
  /// Stored minimizers are capped; metadata still counts all of them.
  std::size_t max_stored_minimizers = 1u << 16;
};

/// Every assignment of the searched variables is visited in Gray-code order.
/// Returns all global minimizers (1e-9 relative ties); metadata carries the
/// energy summary: evaluated, minimizers, max_energy, mean_energy.
inline SampleSet exhaustive_solve(const Qubo& q, const ExhaustiveSolveOptions& opt = {}) {
  Stopwatch clock;
  const QuboGraph g(q, opt.eliminate_ancillas);
  const std::size_t n = g.movable().size();
  if (n > kMaxExhaustiveVariables)
    throw ResourceError("exhaustive_solve: " + std::to_string(n) +
                        " searched variables exceed the bound of " +
                        std::to_string(kMaxExhaustiveVariables));
  FlipState state(g);
  const std::uint64_t total = std::uint64_t{1} << n;
  const double loose = 1e-6 * std::max(1.0, q.max_abs_coefficient());

  double best = state.energy();
  double worst = best;
  long double sum = best;
  std::vector<std::uint64_t> candidates{0};
  std::uint64_t gray = 0;
  for (std::uint64_t t = 1; t < total; ++t) {
    const auto k = static_cast<std::size_t>(std::countr_zero(t));
    state.flip(k);
    gray ^= std::uint64_t{1} << k;
    const double e = state.energy();
    sum += e;
    worst = std::max(worst, e);
    if (e < best - loose) {
      best = e;
      candidates.assign(1, gray);
    } else if (e <= best + loose) {
      best = std::min(best, e);
      if (candidates.size() < 4 * opt.max_stored_minimizers + 16) candidates.push_back(gray);
    }
  }

  // Exact recomputation decides the final tie set.
  std::vector<std::vector<std::uint8_t>> reads;
  std::vector<double> energies;
  std::vector<std::uint8_t> x(q.size(), 0);
  for (std::uint64_t mask : candidates) {
    for (std::size_t k = 0; k < n; ++k) x[g.movable()[k]] = (mask >> k) & 1u;
    state.assign(x);
    reads.push_back(state.assignment());
    energies.push_back(q.energy(state.assignment()));
  }
  const double exact_best = *std::min_element(energies.begin(), energies.end());
  std::vector<std::vector<std::uint8_t>> minimizers;
  for (std::size_t c = 0; c < reads.size(); ++c)
    if (energy_tie(energies[c], exact_best) &&
        minimizers.size() < opt.max_stored_minimizers)
      minimizers.push_back(reads[c]);
  std::size_t tie_count = 0;
  for (double e : energies)
    if (energy_tie(e, exact_best)) ++tie_count;

  SolverMetadata meta;
  meta.solver = "exhaustive";
  meta.reads = 1;
  meta.iterations = static_cast<std::size_t>(total);
  meta.extra["evaluated"] = static_cast<double>(total);
  meta.extra["minimizers"] = static_cast<double>(tie_count);
  meta.extra["max_energy"] = worst;
  meta.extra["mean_energy"] = static_cast<double>(sum / static_cast<long double>(total));
  meta.extra["ancillas_eliminated"] = g.eliminates() ? 1.0 : 0.0;
  meta.wall_time_seconds = clock.seconds();
  return make_sample_set(q, minimizers, "local", std::move(meta));
}

struct AnnealSchedule {
  double initial_temperature = 1.0;
  double final_temperature = 1e-3;
  std::size_t sweeps = 1000;
  std::size_t reads = 20;

  /// Geometric ladder from max |coefficient| down to 1e-3 of it.
  static AnnealSchedule defaults_for(const Qubo& q) {
    AnnealSchedule s;
    s.initial_temperature = std::max(q.max_abs_coefficient(), 1e-12);
    s.final_temperature = 1e-3 * s.initial_temperature;
    return s;
  }

  void check() const {
    if (!(final_temperature > 0.0) || !(initial_temperature >= final_temperature))
      throw ParameterError("AnnealSchedule: need initial >= final > 0");
    if (sweeps < 1) throw ParameterError("AnnealSchedule: sweeps must be >= 1");
    if (reads < 1) throw ParameterError("AnnealSchedule: reads must be >= 1");
  }
};

struct LocalSearchOptions {
  bool eliminate_ancillas = true;
  std::size_t threads = 1;
};

inline SampleSet simulated_annealing(const Qubo& q, const AnnealSchedule& schedule,
                                     std::uint64_t seed,
                                     const LocalSearchOptions& opt = {}) {
  schedule.check();
  Stopwatch clock;
  const QuboGraph g(q, opt.eliminate_ancillas);
  std::vector<std::size_t> flips(schedule.reads, 0);
  auto reads = run_reads<std::vector<std::uint8_t>>(schedule.reads, opt.threads, [&](std::size_t r) {
    Rng rng(mix_seed(seed, r));
    FlipState state(g);
    state.randomize(rng);
    flips[r] = anneal(state, schedule.initial_temperature, schedule.final_temperature,
                      schedule.sweeps, rng, g.tolerance());
    return state.assignment();
  });
  SolverMetadata meta;
  meta.solver = "simulated_annealing";
  meta.seed = seed;
  meta.reads = schedule.reads;
  for (auto f : flips) meta.iterations += f;
  meta.extra["sweeps"] = static_cast<double>(schedule.sweeps);
  meta.wall_time_seconds = clock.seconds();
  return make_sample_set(q, reads, "local", std::move(meta));
}

struct TabuOptions {
  std::size_t tenure = 0;                       ///< 0 picks min(20, max(1, n/4))
  std::optional<std::size_t> max_no_improve;    ///< default max(100, 20 n)
  std::size_t reads = 1;

  std::size_t tenure_for(std::size_t n) const {
    return tenure ? tenure : std::min<std::size_t>(20, std::max<std::size_t>(1, n / 4));
  }
  std::size_t budget_for(std::size_t n) const {
    return max_no_improve ? *max_no_improve : std::max<std::size_t>(100, 20 * n);
  }
};

inline SampleSet tabu_solve(const Qubo& q, const TabuOptions& tabu, std::uint64_t seed,
                            const LocalSearchOptions& opt = {}) {
  if (tabu.reads < 1) throw ParameterError("tabu_solve: reads must be >= 1");
  Stopwatch clock;
  const QuboGraph g(q, opt.eliminate_ancillas);
  const std::size_t n = g.movable().size();
  const std::size_t tenure = tabu.tenure_for(n);
  const std::size_t budget = tabu.budget_for(n);
  std::vector<std::size_t> moves(tabu.reads, 0);
  auto reads = run_reads<std::vector<std::uint8_t>>(tabu.reads, opt.threads, [&](std::size_t r) {
    Rng rng(mix_seed(seed, r));
    FlipState state(g);
    state.randomize(rng);
    moves[r] = tabu_search(state, tenure, budget, g.tolerance());
    return state.assignment();
  });
  SolverMetadata meta;
  meta.solver = "tabu";
  meta.seed = seed;
  meta.reads = tabu.reads;
  for (auto m : moves) meta.iterations += m;
  meta.extra["tenure"] = static_cast<double>(tenure);
  meta.extra["max_no_improve"] = static_cast<double>(budget);
  meta.wall_time_seconds = clock.seconds();
  return make_sample_set(q, reads, "local", std::move(meta));
}

}  // namespace crashnet
