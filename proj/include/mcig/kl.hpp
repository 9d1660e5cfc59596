#pragma once

#include "mcig/families.hpp"
#include "mcig/types.hpp"

namespace mcig {

enum class KlVariant {
  Naive,     // (1/m) sum log p/q; may be negative
  Extended,  // (1/m) sum (log p/q + q/p - 1); every term is >= 0
};

/// Monte Carlo KL(p : q) from m draws of p with the given seed. Throws
/// ErrorCode::NonFinite naming the variate whose log-ratio is not finite.
[[nodiscard]] double mc_kl_estimate(const ComponentDensity &p, const ComponentDensity &q,
                                    Index m, Seed seed, KlVariant variant);

/// y + exp(-y) - 1, accurate near 0 and never negative.
[[nodiscard]] double extended_kl_term(double log_ratio);

} // namespace mcig
