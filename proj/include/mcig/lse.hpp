#pragma once

#include "mcig/types.hpp"

#include <span>

namespace mcig {

/// log(sum_i exp(x_i)); -inf for an empty span.
[[nodiscard]] double log_sum_exp(std::span<const double> x);

/// lse0+(x) = log(1 + sum_i exp(x_i)), the log-sum-exp with an extra zero
/// argument. Exact (0) for empty input; rejects +inf and NaN.
[[nodiscard]] double lse0p(std::span<const double> x);

/// softmax0+(x)_i = exp(x_i) / (1 + sum_k exp(x_k)), the gradient of lse0+.
[[nodiscard]] Vector lse0p_grad(std::span<const double> x);

/// diag(s) - s s^T with s = softmax0+(x). Positive definite for every x.
[[nodiscard]] Matrix lse0p_hess(std::span<const double> x);

/// log(1 - exp(-a)) for a >= 0, accurate at both ends.
[[nodiscard]] double log1mexp(double a);

} // namespace mcig
