#pragma once

// Portable draws from std::mt19937_64. The standard distributions are
// implementation-defined, so seeded outputs would differ across standard
// libraries; these use the top 53 bits of the raw engine output directly.

#include <cmath>
#include <cstdint>
#include <random>

#include "hkglue/constants.hpp"

namespace hkglue {

using Rng = std::mt19937_64;

// Uniform on [0, 1).
inline double uniform01(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

// Box-Muller with one draw discarded, so each call consumes exactly two words.
inline double standard_normal(Rng& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace hkglue
