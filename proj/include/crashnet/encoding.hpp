/// @file encoding.hpp
/// @brief Fixed-point binary encoding v = sum_a x_a 2^a, a in [alpha_min, alpha_max].

#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crashnet/error.hpp"

namespace crashnet {

struct BitSpec {
  int alpha_min = 0;
  int alpha_max = 4;

  /// Integer encoding with exponents 0 .. bits-1.
  static BitSpec integer(int bits) {
    if (bits < 1) throw ParameterError("BitSpec: need at least one bit");
    return {0, bits - 1};
  }

  void check() const {
    if (alpha_min > alpha_max)
      throw ParameterError("BitSpec: alpha_min > alpha_max");
    if (alpha_max > 60 || alpha_min < -60)
      throw ParameterError("BitSpec: exponents must lie in [-60, 60]");
  }

  int bits() const { return alpha_max - alpha_min + 1; }
  double weight(int bit) const { return std::ldexp(1.0, alpha_min + bit); }
  /// sum of 2^a over the range, i.e. 2^(alpha_max+1) - 2^alpha_min.
  double v_max() const {
    return std::ldexp(1.0, alpha_max + 1) - std::ldexp(1.0, alpha_min);
  }
};

/// Greedy most-significant-first; bits come back ordered alpha_min..alpha_max.
/// Non-representable values round down to the grid.
inline std::vector<std::uint8_t> encode_value(const BitSpec& spec, double v) {
  spec.check();
  if (!(v >= 0.0) || !(v <= spec.v_max()))
    throw ParameterError("encode_value: " + std::to_string(v) +
                         " outside [0, " + std::to_string(spec.v_max()) + "]");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(spec.bits()), 0);
  double rest = v;
  for (int b = spec.bits() - 1; b >= 0; --b) {
    const double w = spec.weight(b);
    if (rest >= w) {
      bits[static_cast<std::size_t>(b)] = 1;
      rest -= w;
    }
  }
  return bits;
}

inline double decode_bits(const BitSpec& spec, std::span<const std::uint8_t> bits) {
  spec.check();
  if (bits.size() != static_cast<std::size_t>(spec.bits()))
    throw ParameterError("decode_bits: expected " + std::to_string(spec.bits()) +
                         " bits, got " + std::to_string(bits.size()));
  double v = 0.0;
  for (int b = 0; b < spec.bits(); ++b)
    if (bits[static_cast<std::size_t>(b)]) v += spec.weight(b);
  return v;
}

}  // namespace crashnet
