#pragma once

#include "mcig/families.hpp"
#include "mcig/generator.hpp"
#include "mcig/sampling.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace mcig {

/// Monte Carlo estimate of the mixture-family negentropy,
///
///   G(eta) = (1/m) sum_l m(x_l; eta) log m(x_l; eta) / q(x_l),
///
/// with gradient (1/m) sum_l (p_j - p_0)(1 + log m) / q and Hessian
/// (1/m) sum_l v_l v_l^T, v_l = (p_j - p_0) / sqrt(q m). Everything is
/// evaluated from cached log-densities; sums use the deterministic tree
/// reduction.
///
/// Internally the generator is a weighted list of shards, one per sample
/// set, so aggregation of sub-generators is exact.
class McMixtureGenerator final : public Generator {
public:
  /// Rejects eta closer than this to the simplex boundary.
  static constexpr double kBoundaryMargin = 1e-12;

  /// Throws ErrorCode::Degenerate if m < D, ErrorCode::Precondition if the
  /// sample cache belongs to another family, ErrorCode::NotSpd if the
  /// Hessian at the barycentre is not positive definite.
  McMixtureGenerator(const MixtureFamily &family, const SampleSet &sample);

  Index dim() const noexcept override { return dim_; }
  bool in_domain(const Vector &eta) const override;
  DomainInfo domain() const override;
  Vector interior_point() const override;
  std::string describe() const override;

  [[nodiscard]] Index sample_size() const noexcept { return sample_size_; }
  [[nodiscard]] const std::string &family_fingerprint() const noexcept { return fingerprint_; }

  /// Weighted arithmetic mean sum_i w_i G_i of sub-generators over one family.
  /// Weights must be positive and sum to 1 (within 1e-12).
  static std::shared_ptr<const McMixtureGenerator>
  aggregate(const std::vector<std::pair<std::shared_ptr<const McMixtureGenerator>, double>> &parts);

protected:
  double value_impl(const Vector &eta) const override;
  Vector gradient_impl(const Vector &eta) const override;
  Matrix hessian_impl(const Vector &eta) const override;

private:
  struct ShardData {
    Index size = 0;
    Matrix log_p;     // (D+1) x m
    Vector log_q;     // m
    Matrix log_diff;  // D x m, log |p_j - p_0|
    Matrix sign;      // D x m, sign(p_j - p_0) in {-1, 0, 1}
  };
  struct Shard {
    std::shared_ptr<const ShardData> data;
    double weight = 1.0;
  };

  McMixtureGenerator() = default;
  void check_spd() const;

  Index dim_ = 0;
  Index sample_size_ = 0;
  std::string fingerprint_;
  std::vector<Shard> shards_;
};

[[nodiscard]] std::shared_ptr<const McMixtureGenerator>
build_mc_mixture_generator(const MixtureFamily &family, const SampleSet &sample);

[[nodiscard]] std::shared_ptr<const McMixtureGenerator> aggregate_mixture_generators(
    const std::vector<std::pair<std::shared_ptr<const McMixtureGenerator>, double>> &parts);

} // namespace mcig
