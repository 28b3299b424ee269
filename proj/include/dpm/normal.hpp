#pragma once

#include "dpm/rng.hpp"

namespace dpm {

// Standard normal CDF, evaluated through the complementary error function.
double normal_cdf(double x);

// Standard normal quantile. Rational minimax approximation (Acklam) refined
// by one Newton step against normal_cdf; round-trip error below 1e-9 over
// p in [1e-7, 1 - 1e-7]. Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

// Inverse-CDF sampling; deterministic per generator state.
double sample_normal(SplitMix64& rng);

}  // namespace dpm
