#pragma once

#include "mcig/error.hpp"
#include "mcig/generator.hpp"

#include <optional>

namespace mcig {

struct InversionSettings {
  double tolerance = 1e-10;       // max-norm gradient residual
  int max_iterations = 200;
  double boundary_margin = 1e-9;  // simplex spaces: minimal distance to the boundary
};

struct InversionResult {
  Vector point;
  double residual = 0.0;
  int iterations = 0;
  /// The solution lies closer to the simplex boundary than the margin and
  /// was clamped onto it; `residual` is the residual of the clamped point.
  bool clamped = false;
};

/// ErrorCode::NoSolution raised by a failed gradient inversion.
class InversionError : public Error {
public:
  InversionError(const std::string &message, Vector last_point, double residual);

  [[nodiscard]] const Vector &last_point() const noexcept { return last_point_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }

private:
  Vector last_point_;
  double residual_;
};

/// A generator together with the settings of its numerical Legendre
/// machinery. Coordinates of the generator's argument are called primal
/// (theta), gradients dual (eta); for mixture spaces the argument is the
/// mixture weight vector.
class DuallyFlatSpace {
public:
  explicit DuallyFlatSpace(GeneratorPtr generator, InversionSettings settings = {});

  [[nodiscard]] const Generator &generator() const noexcept { return *generator_; }
  [[nodiscard]] const GeneratorPtr &generator_ptr() const noexcept { return generator_; }
  [[nodiscard]] const InversionSettings &settings() const noexcept { return settings_; }
  [[nodiscard]] Index dim() const noexcept { return generator_->dim(); }

private:
  GeneratorPtr generator_;
  InversionSettings settings_;
};

/// B_F(theta1 : theta2) = F(theta1) - F(theta2) - <theta1 - theta2, grad F(theta2)>,
/// clamped at 0 against rounding.
[[nodiscard]] double bregman_divergence(const DuallyFlatSpace &space, const Vector &theta1,
                                        const Vector &theta2);

/// eta = grad F(theta).
[[nodiscard]] Vector dual_coordinates(const DuallyFlatSpace &space, const Vector &theta);

/// Solves grad F(theta) = eta by damped Newton (step halving until the
/// iterate stays in the domain and the residual decreases), falling back to
/// bracketed bisection in one dimension. Throws InversionError if eta is not
/// in the gradient image.
[[nodiscard]] InversionResult primal_coordinates(const DuallyFlatSpace &space, const Vector &eta,
                                                 const std::optional<Vector> &start = {});

/// F*(eta) = <eta, theta(eta)> - F(theta(eta)).
[[nodiscard]] double dual_potential(const DuallyFlatSpace &space, const Vector &eta);

/// B_{F*}(eta1 : eta2), evaluated through inversion; equals B_F(theta2 : theta1).
[[nodiscard]] double dual_bregman_divergence(const DuallyFlatSpace &space, const Vector &eta1,
                                             const Vector &eta2);

enum class GeodesicKind { Primal, Dual };

struct GeodesicPoint {
  double lambda = 0.0;
  Vector primal;
  Vector dual;
};

/// Point at lambda on the primal (straight in theta) or dual (straight in
/// eta) geodesic from p to q, both given in primal coordinates.
[[nodiscard]] GeodesicPoint geodesic(const DuallyFlatSpace &space, const Vector &p,
                                     const Vector &q, double lambda, GeodesicKind kind);

/// J^alpha(p : q) = (1 - alpha) F(p) + alpha F(q) - F((1 - alpha) p + alpha q).
[[nodiscard]] double skew_jensen(const DuallyFlatSpace &space, const Vector &p,
                                 const Vector &q, double alpha);

/// B(p : q) + B(q : p). Also checks the identity with <p - q, grad F(p) - grad F(q)>
/// (relative 1e-10 above a rounding floor) and throws ErrorCode::Algorithm if
/// it fails.
[[nodiscard]] double jeffreys_divergence(const DuallyFlatSpace &space, const Vector &p,
                                         const Vector &q);

/// Skew-Jensen surrogate of the Jeffreys divergence,
/// (1/alpha) (J^alpha(p : q) + J^{1-alpha}(p : q)); tends to B(q : p) + B(p : q)
/// as alpha -> 0.
[[nodiscard]] double jeffreys_skew(const DuallyFlatSpace &space, const Vector &p,
                                   const Vector &q, double alpha);

/// ||H(theta) H(theta_hat)^{-1} - I||_max with theta_hat the numerical
/// inverse of eta = grad F(theta): the deviation from the Crouzeix identity.
/// Throws ErrorCode::NotSpd on a singular Hessian.
[[nodiscard]] double crouzeix_deviation(const DuallyFlatSpace &space, const Vector &theta);

} // namespace mcig
