#pragma once

#include "mcig/families.hpp"
#include "mcig/generator.hpp"
#include "mcig/quadrature.hpp"

#include <memory>
#include <vector>

namespace mcig {

/// Cumulant of the univariate normal family with t(x) = (x, x^2):
/// F(theta) = -theta_1^2 / (4 theta_2) + (1/2) log(pi / -theta_2), theta_2 < 0.
[[nodiscard]] GeneratorPtr gaussian_ef_oracle();

/// F(theta) = log(1 + exp(theta)) on R.
[[nodiscard]] GeneratorPtr binomial_ef_oracle();

/// Polynomial exponential family F(theta) = log int exp(sum_j theta_j x^{p_j}) dx,
/// gradient E[t] and Hessian Cov[t], all by adaptive quadrature on the interval
/// where the integrand exceeds 1e-16 of its peak. The domain requires the
/// highest power to be even with a negative coefficient.
class PefQuadratureOracle final : public Generator {
public:
  explicit PefQuadratureOracle(std::vector<int> powers, QuadratureOptions options = {});

  Index dim() const noexcept override { return static_cast<Index>(powers_.size()); }
  bool in_domain(const Vector &theta) const override;
  DomainInfo domain() const override;
  Vector interior_point() const override;
  std::string describe() const override;

  [[nodiscard]] const std::vector<int> &powers() const noexcept { return powers_; }
  /// Integration interval used at theta.
  [[nodiscard]] std::pair<double, double> truncation(const Vector &theta) const;

  static constexpr double kRelativeCutoff = 1e-16;

protected:
  double value_impl(const Vector &theta) const override;
  Vector gradient_impl(const Vector &theta) const override;
  Matrix hessian_impl(const Vector &theta) const override;

private:
  struct Window {
    double lower;
    double upper;
    double peak_x;
    double peak_log;
  };
  [[nodiscard]] double exponent(const Vector &theta, double x) const;
  [[nodiscard]] Window window(const Vector &theta) const;
  [[nodiscard]] Vector integrate(const Vector &theta, Index dim,
                                 const std::function<void(double, const Vector &, Vector &)> &f,
                                 const Window &w) const;

  std::vector<int> powers_;
  std::size_t lead_ = 0;  // position of the highest power
  QuadratureOptions options_;
};

[[nodiscard]] std::shared_ptr<const PefQuadratureOracle>
pef_quadrature_oracle(std::vector<int> powers);

/// The exact mixture-family negentropy G(eta) = int m log m with its
/// gradient and Hessian, by real-line quadrature. Ground truth for the MC
/// mixture generator; every evaluation runs a full adaptive quadrature.
class MixtureNegentropyOracle final : public Generator {
public:
  explicit MixtureNegentropyOracle(MixtureFamily family, QuadratureOptions options = {});

  Index dim() const noexcept override { return family_.order(); }
  bool in_domain(const Vector &eta) const override;
  DomainInfo domain() const override;
  Vector interior_point() const override;
  std::string describe() const override;

  /// KL(m(.; eta1) : m(.; eta2)) by the same quadrature.
  [[nodiscard]] double kl(const Vector &eta1, const Vector &eta2) const;

protected:
  double value_impl(const Vector &eta) const override;
  Vector gradient_impl(const Vector &eta) const override;
  Matrix hessian_impl(const Vector &eta) const override;

private:
  [[nodiscard]] Vector integrate(Index dim, const VectorIntegrand &f) const;

  MixtureFamily family_;
  QuadratureOptions options_;
  double center_ = 0.0;
  double scale_ = 1.0;
};

[[nodiscard]] std::shared_ptr<const MixtureNegentropyOracle>
mixture_negentropy_oracle(const MixtureFamily &family);

} // namespace mcig
