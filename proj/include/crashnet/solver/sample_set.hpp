/// @file sample_set.hpp
/// @brief Solver output: distinct assignments with energies and read counts.

#pragma once
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "crashnet/qubo.hpp"

namespace crashnet {

struct Sample {
  std::vector<std::uint8_t> assignment;
  double energy = 0.0;
  std::size_t occurrences = 1;
  std::string source = "local";
};

struct SolverMetadata {
  std::string solver;
  std::uint64_t seed = 0;
  std::size_t reads = 0;
  std::size_t iterations = 0;
  double wall_time_seconds = 0.0;
  std::map<std::string, double> extra;
};

struct SampleSet {
  /// Ascending energy, then lexicographic assignment.
  std::vector<Sample> samples;
  /// Lowest energy; near-ties (1e-9 relative) go to the lexicographically
  /// smallest assignment.
  std::size_t best = 0;
  SolverMetadata metadata;

  bool empty() const { return samples.empty(); }
  const Sample& best_sample() const { return samples.at(best); }
  double best_energy() const { return best_sample().energy; }
  std::size_t total_reads() const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.occurrences;
    return n;
  }
};

inline bool energy_tie(double a, double b) {
  return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

/// Merges duplicate assignments, recomputes every energy from @p q and
/// orders the samples.
inline SampleSet make_sample_set(const Qubo& q,
                                 const std::vector<std::vector<std::uint8_t>>& reads,
                                 const std::vector<std::size_t>& occurrences,
                                 const std::string& source, SolverMetadata meta) {
  std::map<std::vector<std::uint8_t>, std::size_t> counts;
  for (std::size_t r = 0; r < reads.size(); ++r)
    counts[reads[r]] += occurrences.empty() ? 1 : occurrences[r];
  SampleSet set;
  set.metadata = std::move(meta);
  for (auto& [x, c] : counts) set.samples.push_back({x, q.energy(x), c, source});
  std::stable_sort(set.samples.begin(), set.samples.end(),
                   [](const Sample& a, const Sample& b) { return a.energy < b.energy; });
  set.best = 0;
  for (std::size_t i = 1; i < set.samples.size(); ++i) {
    if (!energy_tie(set.samples[i].energy, set.samples[0].energy)) break;
    if (set.samples[i].assignment < set.samples[set.best].assignment) set.best = i;
  }
  return set;
}

inline SampleSet make_sample_set(const Qubo& q,
                                 const std::vector<std::vector<std::uint8_t>>& reads,
                                 const std::string& source, SolverMetadata meta) {
  return make_sample_set(q, reads, {}, source, std::move(meta));
}

/// Runs fn(read) for every read index on up to @p threads workers; results
/// land at their read index, so the outcome does not depend on scheduling.
template <class T, class Fn>
std::vector<T> run_reads(std::size_t reads, std::size_t threads, Fn&& fn) {
  std::vector<T> out(reads);
  threads = std::max<std::size_t>(1, std::min(threads, reads));
  if (threads == 1) {
    for (std::size_t r = 0; r < reads; ++r) out[r] = fn(r);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < reads; r += threads) out[r] = fn(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace crashnet
