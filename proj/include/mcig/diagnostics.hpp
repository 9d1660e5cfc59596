#pragma once

#include "mcig/generator.hpp"
#include "mcig/rng.hpp"

namespace mcig {

/// Fourth-order central differences of F with per-coordinate steps h_i.
[[nodiscard]] Vector fd_gradient(const Generator &g, const Vector &theta, const Vector &steps);
/// Fourth-order central differences of grad F, symmetrized.
[[nodiscard]] Matrix fd_hessian(const Generator &g, const Vector &theta, const Vector &steps);

/// h_i = step * max(1, |theta_i|).
[[nodiscard]] Vector relative_steps(const Vector &theta, double step = 1e-3);
/// h_i = step * min(max(1, |theta_i|), 1 / sqrt(H_ii)): shorter steps along
/// strongly curved coordinates, e.g. high-order sufficient statistics.
[[nodiscard]] Vector curvature_steps(const Generator &g, const Vector &theta,
                                     double step = 1e-3);

/// Uniform (flat Dirichlet) point of the D-simplex, pulled toward the
/// barycentre: (1 - shrink) * u + shrink * barycentre.
[[nodiscard]] Vector random_simplex_point(VariateStream &stream, Index dim, double shrink = 0.0);

/// Smallest eigenvalue of a symmetric matrix.
[[nodiscard]] double min_eigenvalue(const Matrix &h);

/// Smallest eigenvalue of the unit-diagonal matrix D^{-1/2} H D^{-1/2},
/// D = diag(H). By Sylvester's law of inertia it has the sign of H's
/// smallest eigenvalue, and it stays resolvable when the entries of H span
/// more orders of magnitude than a double can (high powers of heavy-tailed
/// variates). Returns the smallest diagonal entry if that is not positive.
[[nodiscard]] double scaled_min_eigenvalue(const Matrix &h);

struct DerivativeReport {
  double gradient_error = 0.0;  // max-norm relative error vs fd_gradient
  double hessian_error = 0.0;   // max-norm relative error vs fd_hessian
  double symmetry_error = 0.0;  // max |H - H^T|
  double min_eigenvalue = 0.0;
  double scaled_min_eigenvalue = 0.0;  // decides positive definiteness
};

[[nodiscard]] DerivativeReport check_derivatives(const Generator &g, const Vector &theta,
                                                 const Vector &steps);
/// Uses curvature_steps.
[[nodiscard]] DerivativeReport check_derivatives(const Generator &g, const Vector &theta);

} // namespace mcig
