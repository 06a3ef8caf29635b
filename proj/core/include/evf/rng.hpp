#pragma once

#include <random>

namespace evf {

/// The single RNG type used across the project; all stochastic behavior is
/// reproducible from a 64-bit seed.
using Rng = std::mt19937_64;

}  // namespace evf
