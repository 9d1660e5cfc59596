#pragma once

#include "mcig/rng.hpp"
#include "mcig/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mcig {

/// Interval support (lower, upper); infinite bounds allowed.
struct Support {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool contains(double x) const noexcept {
    return x > lower && x < upper;
  }
  [[nodiscard]] bool is_real_line() const noexcept {
    return lower == -std::numeric_limits<double>::infinity() &&
           upper == std::numeric_limits<double>::infinity();
  }
};

/// Parameters of a built-in component, kept for serialization.
struct ComponentSpec {
  std::string kind;  // "gaussian" | "laplace" | "cauchy"
  double location = 0.0;
  double scale = 1.0;
};

/// A fixed density on a univariate support, evaluated in log-space.
class ComponentDensity {
public:
  using LogDensityFn = std::function<double(double)>;
  using SamplerFn = std::function<double(VariateStream &)>;

  ComponentDensity(std::string label, LogDensityFn log_density,
                   SamplerFn sampler, Support support = {});

  static ComponentDensity gaussian(double mean, double stddev);
  static ComponentDensity laplace(double location, double scale);
  static ComponentDensity cauchy(double location, double scale);
  static ComponentDensity from_spec(const ComponentSpec &spec);

  [[nodiscard]] double log_density(double x) const { return log_density_(x); }
  [[nodiscard]] double density(double x) const;
  [[nodiscard]] double sample(VariateStream &stream) const { return sampler_(stream); }

  [[nodiscard]] const std::string &label() const noexcept { return label_; }
  [[nodiscard]] const Support &support() const noexcept { return support_; }
  /// Set for built-ins only; user components are not serializable.
  [[nodiscard]] const std::optional<ComponentSpec> &spec() const noexcept { return spec_; }

private:
  std::string label_;
  LogDensityFn log_density_;
  SamplerFn sampler_;
  Support support_;
  std::optional<ComponentSpec> spec_;
};

/// m(x; eta) = sum_i eta_i p_i(x) + (1 - sum_i eta_i) p_0(x), eta in the open
/// simplex of dimension D = components - 1.
class MixtureFamily {
public:
  /// Validates distinct labels and, statistically, the affine independence
  /// of the components (kIndependenceDraws draws from the equal-weight
  /// mixture). Throws ErrorCode::Degenerate on failure.
  explicit MixtureFamily(std::vector<ComponentDensity> components);

  /// Skips the independence checks; only the component count is validated.
  /// Degenerate families built this way are rejected later by the generators.
  static MixtureFamily unchecked(std::vector<ComponentDensity> components);

  [[nodiscard]] Index order() const noexcept {
    return static_cast<Index>(components_.size()) - 1;
  }
  [[nodiscard]] const std::vector<ComponentDensity> &components() const noexcept {
    return components_;
  }
  [[nodiscard]] const ComponentDensity &component(Index j) const {
    return components_.at(static_cast<std::size_t>(j));
  }
  /// Labels joined with '|'; identifies the family in sample caches.
  [[nodiscard]] std::string fingerprint() const;

  static constexpr int kIndependenceDraws = 10000;
  static constexpr Seed kIndependenceSeed = 0x1dec0de5ULL;

private:
  struct NoCheck {};
  MixtureFamily(std::vector<ComponentDensity> components, NoCheck);

  std::vector<ComponentDensity> components_;
};

[[nodiscard]] bool in_open_simplex(const Vector &eta, double margin = 0.0) noexcept;

/// log m(x; eta) by max-shifted log-sum-exp of log(w_j) + log p_j(x).
/// Throws ErrorCode::Domain unless eta lies in the open simplex.
[[nodiscard]] double mixture_log_density(const MixtureFamily &family,
                                         const Vector &eta, double x);

/// m(.; eta) as a standalone density with an ancestral sampler.
[[nodiscard]] ComponentDensity mixture_density(const MixtureFamily &family,
                                               const Vector &eta);

/// p(x; theta) proportional to exp(<t(x), theta> + k(x)) on `support`.
class ExponentialFamily {
public:
  using StatisticFn = std::function<Vector(double)>;
  using CarrierFn = std::function<double(double)>;

  /// Validates that 1, t_1, ..., t_D are linearly independent on
  /// kIndependenceDraws reference draws over the support.
  ExponentialFamily(std::string label, Index order, StatisticFn statistic,
                    CarrierFn carrier, Support support = {});

  /// t(x) = (x^p)_{p in powers}, k = 0, support the real line.
  static ExponentialFamily polynomial(std::vector<int> powers);
  /// The univariate normal family, t(x) = (x, x^2).
  static ExponentialFamily gaussian() { return polynomial({1, 2}); }

  [[nodiscard]] Vector statistic(double x) const { return statistic_(x); }
  [[nodiscard]] double carrier(double x) const { return carrier_(x); }
  [[nodiscard]] Index order() const noexcept { return order_; }
  [[nodiscard]] const Support &support() const noexcept { return support_; }
  [[nodiscard]] const std::string &label() const noexcept { return label_; }
  /// Non-empty for polynomial families.
  [[nodiscard]] const std::vector<int> &powers() const noexcept { return powers_; }

  static constexpr int kIndependenceDraws = 10000;

private:
  std::string label_;
  Index order_;
  StatisticFn statistic_;
  CarrierFn carrier_;
  Support support_;
  std::vector<int> powers_;
};

} // namespace mcig
