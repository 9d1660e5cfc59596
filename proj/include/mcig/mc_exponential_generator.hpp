#pragma once

#include "mcig/families.hpp"
#include "mcig/generator.hpp"
#include "mcig/sampling.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace mcig {

/// Monte Carlo estimate of an exponential-family cumulant.
///
/// The raw estimator is
///
///   F_dagger(theta) = log((1/m) sum_i exp(<t(x_i), theta> + k(x_i) - log q(x_i))).
///
/// Factoring out a reference variate r leaves
///
///   F(theta) = lse0+(<a_i, theta> + b_i, i != r),
///   a_i = t(x_i) - t(x_r),  b_i = k(x_i) - k(x_r) - log q(x_i) + log q(x_r),
///
/// which differs from F_dagger by the affine term
/// <t(x_r), theta> + k(x_r) - log q(x_r) - log m. value()/gradient()/hessian()
/// are those of the lse0+ form; the dagger_* functions re-add the affine term.
/// The domain is all of R^D.
class McExponentialGenerator final : public Generator {
public:
  /// r defaults to argmin_i sum_j t_j(x_i), lowest index on ties.
  /// Throws ErrorCode::Degenerate if m < D + 1 or all t(x_i) coincide, and
  /// ErrorCode::NotSpd if the Hessian at theta = 0 is not positive definite.
  McExponentialGenerator(const ExponentialFamily &family, const SampleSet &sample,
                         std::optional<Index> reference = std::nullopt);

  Index dim() const noexcept override { return a_.rows(); }
  bool in_domain(const Vector &theta) const override;
  Vector interior_point() const override { return Vector::Zero(dim()); }
  std::string describe() const override;

  [[nodiscard]] Index reference_index() const noexcept { return reference_; }
  [[nodiscard]] Index sample_size() const noexcept { return a_.cols() + 1; }
  [[nodiscard]] const std::string &family_label() const noexcept { return family_label_; }
  [[nodiscard]] const Vector &reference_statistic() const noexcept { return t_ref_; }
  /// k(x_r) - log q(x_r) - log m.
  [[nodiscard]] double reference_offset() const noexcept { return offset_; }

  [[nodiscard]] double dagger_value(const Vector &theta) const;
  [[nodiscard]] Vector dagger_gradient(const Vector &theta) const;
  [[nodiscard]] Matrix dagger_hessian(const Vector &theta) const { return hessian(theta); }

protected:
  double value_impl(const Vector &theta) const override;
  Vector gradient_impl(const Vector &theta) const override;
  Matrix hessian_impl(const Vector &theta) const override;

private:
  struct Softmax {
    Vector weights;  // sigma_i for i != r
    double shift;
    double total;    // exp(-shift) + sum exp(z_i - shift)
  };
  [[nodiscard]] Softmax softmax(const Vector &theta) const;

  std::string family_label_;
  Index reference_ = 0;
  Matrix a_;  // D x (m - 1)
  Vector b_;  // m - 1
  Vector t_ref_;
  double offset_ = 0.0;
};

[[nodiscard]] std::shared_ptr<const McExponentialGenerator>
build_mc_exponential_generator(const ExponentialFamily &family, const SampleSet &sample,
                               std::optional<Index> reference = std::nullopt);

/// Exponential (f-mean with f = exp) aggregation of exponential-family
/// sub-generators: F(theta) = log sum_i w_i exp(F_dagger_i(theta)). For the
/// weights |S_i| / |S| of a partition this equals the single-shot F_dagger.
class ExponentialMeanGenerator final : public Generator {
public:
  /// Each part must be an McExponentialGenerator (it carries the affine
  /// reconstruction data); weights positive, summing to 1 within 1e-12.
  explicit ExponentialMeanGenerator(std::vector<std::pair<GeneratorPtr, double>> parts);

  Index dim() const noexcept override { return parts_.front().first->dim(); }
  bool in_domain(const Vector &theta) const override { return theta.size() == dim(); }
  Vector interior_point() const override { return Vector::Zero(dim()); }
  std::string describe() const override;

protected:
  double value_impl(const Vector &theta) const override;
  Vector gradient_impl(const Vector &theta) const override;
  Matrix hessian_impl(const Vector &theta) const override;

private:
  std::vector<std::pair<std::shared_ptr<const McExponentialGenerator>, double>> parts_;
};

[[nodiscard]] std::shared_ptr<const ExponentialMeanGenerator>
aggregate_exponential_generators(std::vector<std::pair<GeneratorPtr, double>> parts);

} // namespace mcig
