#pragma once

#include "mcig/types.hpp"

#include <functional>
#include <span>

namespace mcig {

struct QuadratureOptions {
  double abs_tolerance = 1e-10;
  int max_intervals = 4000;
};

struct QuadratureResult {
  Vector value;
  double abs_error = 0.0;  // max-norm Kronrod/Gauss discrepancy, summed
  int intervals = 0;
  bool converged = false;
};

/// Vector-valued integrand: writes f(x) into `out` (pre-sized to dim).
using VectorIntegrand = std::function<void(double x, Vector &out)>;

/// Globally adaptive 7/15-point Gauss-Kronrod on [breakpoints.front(),
/// breakpoints.back()], starting from the given partition and bisecting the
/// interval with the largest error until the summed error estimate drops
/// below the absolute tolerance.
[[nodiscard]] QuadratureResult
integrate_adaptive(const VectorIntegrand &f, Index dim,
                   std::span<const double> breakpoints,
                   const QuadratureOptions &options = {});

/// Integral over the whole real line through x = c + s t / (1 - t^2),
/// t in (-1, 1). The integrand must return finite values (zero in the far
/// tails) for arbitrarily large |x|.
[[nodiscard]] QuadratureResult
integrate_real_line(const VectorIntegrand &f, Index dim, double center,
                    double scale, const QuadratureOptions &options = {});

[[nodiscard]] double integrate_scalar(const std::function<double(double)> &f,
                                      double a, double b,
                                      const QuadratureOptions &options = {});

} // namespace mcig
