/// @file majority.hpp
/// @brief Per-variable consensus over the reads of a SampleSet.

#pragma once
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crashnet/error.hpp"
#include "crashnet/solver/sample_set.hpp"

namespace crashnet {

/// Weighted majority of each variable in @p subset (all variables when
/// absent), weights being read counts. An exact tie takes the value of the
/// best sample. Output is indexed like @p subset.
inline std::vector<std::uint8_t> majority_vote(
    const SampleSet& set, std::optional<std::span<const VarId>> subset = std::nullopt) {
  if (set.empty()) throw ParameterError("majority_vote: empty sample set");
  const auto& best = set.best_sample().assignment;
  std::vector<VarId> vars;
  if (subset) {
    vars.assign(subset->begin(), subset->end());
  } else {
    for (std::size_t i = 0; i < best.size(); ++i) vars.push_back(static_cast<VarId>(i));
  }
  std::vector<std::uint8_t> out(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const VarId v = vars[k];
    if (v >= best.size())
      throw ParameterError("majority_vote: variable " + std::to_string(v) + " out of range");
    std::size_t ones = 0;
    std::size_t zeros = 0;
    for (const auto& s : set.samples) (s.assignment[v] ? ones : zeros) += s.occurrences;
    out[k] = ones == zeros ? best[v] : static_cast<std::uint8_t>(ones > zeros);
  }
  return out;
}

}  // namespace crashnet
