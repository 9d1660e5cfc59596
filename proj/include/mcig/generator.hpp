#pragma once

#include "mcig/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mcig {

enum class DomainShape {
  Unbounded,    // all of R^D
  Box,          // lower < theta < upper componentwise (bounds may be infinite)
  OpenSimplex,  // theta_i > margin, sum(theta) < 1 - margin
};

struct DomainInfo {
  DomainShape shape = DomainShape::Unbounded;
  Vector lower;  // Box only
  Vector upper;  // Box only
  double margin = 0.0;
};

/// A Bregman generator F with analytic gradient and Hessian.
///
/// The public entry points validate the argument's dimension and domain
/// (ErrorCode::Precondition / ErrorCode::Domain) before dispatching to the
/// implementation.
class Generator {
public:
  virtual ~Generator() = default;

  [[nodiscard]] virtual Index dim() const noexcept = 0;
  [[nodiscard]] virtual bool in_domain(const Vector &theta) const = 0;
  [[nodiscard]] virtual DomainInfo domain() const { return {}; }
  /// A point well inside the domain; the default start for inversions.
  [[nodiscard]] virtual Vector interior_point() const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;

  [[nodiscard]] double value(const Vector &theta) const;
  [[nodiscard]] Vector gradient(const Vector &theta) const;
  [[nodiscard]] Matrix hessian(const Vector &theta) const;

  /// Throws unless theta has dimension dim() and lies in the domain.
  void require_domain(const Vector &theta) const;

protected:
  [[nodiscard]] virtual double value_impl(const Vector &theta) const = 0;
  [[nodiscard]] virtual Vector gradient_impl(const Vector &theta) const = 0;
  [[nodiscard]] virtual Matrix hessian_impl(const Vector &theta) const = 0;
};

using GeneratorPtr = std::shared_ptr<const Generator>;

/// Cholesky-based positive-definiteness test with a relative pivot floor.
[[nodiscard]] bool is_spd(const Matrix &h, double relative_floor = 1e-14);

/// Max-norm relative difference ||a - b||_inf / ||b||_inf (absolute if b = 0).
[[nodiscard]] double relative_error(const Matrix &a, const Matrix &b);
[[nodiscard]] double relative_error(double a, double b);

/// F(theta) + <slope, theta> + intercept. Same Bregman divergence as F.
class AffineShiftedGenerator final : public Generator {
public:
  AffineShiftedGenerator(GeneratorPtr base, Vector slope, double intercept);

  Index dim() const noexcept override { return base_->dim(); }
  bool in_domain(const Vector &theta) const override { return base_->in_domain(theta); }
  DomainInfo domain() const override { return base_->domain(); }
  Vector interior_point() const override { return base_->interior_point(); }
  std::string describe() const override;

protected:
  double value_impl(const Vector &theta) const override;
  Vector gradient_impl(const Vector &theta) const override;
  Matrix hessian_impl(const Vector &theta) const override;

private:
  GeneratorPtr base_;
  Vector slope_;
  double intercept_;
};

/// sum_i lambda_i F_i with lambda_i > 0, all F_i of one dimension. The
/// domain is the intersection of the parts' domains.
class LinearCombinationGenerator final : public Generator {
public:
  explicit LinearCombinationGenerator(std::vector<std::pair<double, GeneratorPtr>> terms);

  Index dim() const noexcept override { return terms_.front().second->dim(); }
  bool in_domain(const Vector &theta) const override;
  DomainInfo domain() const override { return terms_.front().second->domain(); }
  Vector interior_point() const override { return terms_.front().second->interior_point(); }
  std::string describe() const override;

protected:
  double value_impl(const Vector &theta) const override;
  Vector gradient_impl(const Vector &theta) const override;
  Matrix hessian_impl(const Vector &theta) const override;

private:
  std::vector<std::pair<double, GeneratorPtr>> terms_;
};

} // namespace mcig
