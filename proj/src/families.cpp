#include "mcig/families.hpp"

#include "mcig/error.hpp"
#include "mcig/lse.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mcig {
namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

void require_positive_scale(double scale, const char *what) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::Precondition,
                fmt::format("{} scale must be positive and finite, got {}", what, scale));
}

void require_finite(double v, const char *what) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::Precondition, fmt::format("{} must be finite", what));
}

// Draws from the equal-weight mixture of the components, component index
// first, then the component's own sampler.
double draw_equal_mixture(const std::vector<ComponentDensity> &components,
                          VariateStream &stream) {
  const auto k = components.size();
  auto j = static_cast<std::size_t>(stream.uniform() * static_cast<double>(k));
  j = std::min(j, k - 1);
  return components[j].sample(stream);
}

void check_mixture_independence(const std::vector<ComponentDensity> &components) {
  const Index d = static_cast<Index>(components.size()) - 1;
  const Index k = d + 1;
  const double log_k = std::log(static_cast<double>(k));
  Matrix gram = Matrix::Zero(d, d);
  std::vector<double> lp(static_cast<std::size_t>(k));
  Vector row(d);
  for (int i = 0; i < MixtureFamily::kIndependenceDraws; ++i) {
    VariateStream stream(MixtureFamily::kIndependenceSeed, static_cast<std::uint64_t>(i));
    const double x = draw_equal_mixture(components, stream);
    for (Index j = 0; j < k; ++j)
      lp[static_cast<std::size_t>(j)] = components[static_cast<std::size_t>(j)].log_density(x);
    const double log_q = log_sum_exp(lp) - log_k;
    const double r0 = std::exp(lp[0] - log_q);
    for (Index j = 1; j < k; ++j)
      row[j - 1] = std::exp(lp[static_cast<std::size_t>(j)] - log_q) - r0;
    gram.noalias() += row * row.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(largest > 0.0) || smallest <= 1e-12 * largest)
    throw Error(ErrorCode::Degenerate,
                "mixture components are affinely dependent on the reference sample");
}

double reference_draw(const Support &support, VariateStream &stream) {
  const bool lower_finite = std::isfinite(support.lower);
  const bool upper_finite = std::isfinite(support.upper);
  if (lower_finite && upper_finite)
    return support.lower + (support.upper - support.lower) * stream.uniform();
  if (lower_finite)
    return support.lower - std::log(stream.uniform());
  if (upper_finite)
    return support.upper + std::log(stream.uniform());
  return stream.standard_normal();
}

} // namespace


ComponentDensity::ComponentDensity(std::string label, LogDensityFn log_density,
                                   SamplerFn sampler, Support support)
    : label_(std::move(label)), log_density_(std::move(log_density)),
      sampler_(std::move(sampler)), support_(support) {
  if (label_.empty())
    throw Error(ErrorCode::Precondition, "component label must not be empty");
  if (!log_density_ || !sampler_)
    throw Error(ErrorCode::Precondition,
                fmt::format("component '{}' needs a log-density and a sampler", label_));
}

double ComponentDensity::density(double x) const { return std::exp(log_density(x)); }

ComponentDensity ComponentDensity::gaussian(double mean, double stddev) {
  require_finite(mean, "gaussian mean");
  require_positive_scale(stddev, "gaussian");
  const double log_norm = -std::log(stddev) - kHalfLogTwoPi;
  ComponentDensity c(
      fmt::format("gaussian({},{})", mean, stddev),
      [=](double x) {
        const double z = (x - mean) / stddev;
        return log_norm - 0.5 * z * z;
      },
      [=](VariateStream &s) { return mean + stddev * s.standard_normal(); });
  c.spec_ = ComponentSpec{"gaussian", mean, stddev};
  return c;
}

ComponentDensity ComponentDensity::laplace(double location, double scale) {
  require_finite(location, "laplace location");
  require_positive_scale(scale, "laplace");
  const double log_norm = -std::log(2.0 * scale);
  ComponentDensity c(
      fmt::format("laplace({},{})", location, scale),
      [=](double x) { return log_norm - std::abs(x - location) / scale; },
      [=](VariateStream &s) {
        const double u = s.uniform() - 0.5;
        const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
        return u < 0.0 ? location - magnitude : location + magnitude;
      });
  c.spec_ = ComponentSpec{"laplace", location, scale};
  return c;
}

ComponentDensity ComponentDensity::cauchy(double location, double scale) {
  require_finite(location, "cauchy location");
  require_positive_scale(scale, "cauchy");
  const double log_norm = -std::log(std::numbers::pi * scale);
  ComponentDensity c(
      fmt::format("cauchy({},{})", location, scale),
      [=](double x) {
        const double z = (x - location) / scale;
        return log_norm - std::log1p(z * z);
      },
      [=](VariateStream &s) {
        return location + scale * std::tan(std::numbers::pi * (s.uniform() - 0.5));
      });
  c.spec_ = ComponentSpec{"cauchy", location, scale};
  return c;
}

ComponentDensity ComponentDensity::from_spec(const ComponentSpec &spec) {
  if (spec.kind == "gaussian")
    return gaussian(spec.location, spec.scale);
  if (spec.kind == "laplace")
    return laplace(spec.location, spec.scale);
  if (spec.kind == "cauchy")
    return cauchy(spec.location, spec.scale);
  throw Error(ErrorCode::Precondition, fmt::format("unknown component kind '{}'", spec.kind));
}


MixtureFamily::MixtureFamily(std::vector<ComponentDensity> components, NoCheck)
    : components_(std::move(components)) {
  if (components_.size() < 2)
    throw Error(ErrorCode::Precondition, "a mixture family needs at least two components");
}

MixtureFamily::MixtureFamily(std::vector<ComponentDensity> components)
    : MixtureFamily(std::move(components), NoCheck{}) {
  std::set<std::string> labels;
  for (const auto &c : components_)
    if (!labels.insert(c.label()).second)
      throw Error(ErrorCode::Degenerate,
                  fmt::format("duplicate mixture component '{}'", c.label()));
  check_mixture_independence(components_);
}

MixtureFamily MixtureFamily::unchecked(std::vector<ComponentDensity> components) {
  return MixtureFamily(std::move(components), NoCheck{});
}

std::string MixtureFamily::fingerprint() const {
  std::string out;
  for (const auto &c : components_) {
    if (!out.empty())
      out += '|';
    out += c.label();
  }
  return out;
}

bool in_open_simplex(const Vector &eta, double margin) noexcept {
  if (!eta.allFinite())
    return false;
  double sum = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > margin))
      return false;
    sum += eta[i];
  }
  return sum < 1.0 - margin;
}

double mixture_log_density(const MixtureFamily &family, const Vector &eta, double x) {
  if (eta.size() != family.order())
    throw Error(ErrorCode::Precondition,
                fmt::format("mixture parameter has {} entries, family order is {}",
                            eta.size(), family.order()));
  if (!in_open_simplex(eta))
    throw Error(ErrorCode::Domain, "mixture parameter outside the open simplex");
  const Index d = family.order();
  std::vector<double> terms(static_cast<std::size_t>(d + 1));
  terms[0] = std::log1p(-eta.sum()) + family.component(0).log_density(x);
  for (Index j = 1; j <= d; ++j)
    terms[static_cast<std::size_t>(j)] =
        std::log(eta[j - 1]) + family.component(j).log_density(x);
  return log_sum_exp(terms);
}

ComponentDensity mixture_density(const MixtureFamily &family, const Vector &eta) {
  // Validates eta.
  (void)mixture_log_density(family, eta, 0.0);
  std::vector<double> cumulative;
  double acc = 1.0 - eta.sum();
  cumulative.push_back(acc);
  for (Index j = 0; j < eta.size(); ++j) {
    acc += eta[j];
    cumulative.push_back(acc);
  }
  std::vector<std::string> weights;
  for (Index j = 0; j < eta.size(); ++j)
    weights.push_back(fmt::format("{}", eta[j]));
  return ComponentDensity(
      fmt::format("mixture[{}]@({})", family.fingerprint(), fmt::join(weights, ",")),
      [family, eta](double x) { return mixture_log_density(family, eta, x); },
      [family, cumulative](VariateStream &s) {
        const double u = s.uniform() * cumulative.back();
        std::size_t j = 0;
        while (j + 1 < cumulative.size() && u >= cumulative[j])
          ++j;
        return family.component(static_cast<Index>(j)).sample(s);
      });
}


ExponentialFamily::ExponentialFamily(std::string label, Index order,
                                     StatisticFn statistic, CarrierFn carrier,
                                     Support support)
    : label_(std::move(label)), order_(order), statistic_(std::move(statistic)),
      carrier_(std::move(carrier)), support_(support) {
  if (order_ < 1)
    throw Error(ErrorCode::Precondition, "exponential family order must be >= 1");
  if (!statistic_ || !carrier_)
    throw Error(ErrorCode::Precondition, "exponential family needs t(x) and k(x)");

  Matrix design(kIndependenceDraws, order_ + 1);
  for (int i = 0; i < kIndependenceDraws; ++i) {
    VariateStream stream(MixtureFamily::kIndependenceSeed, static_cast<std::uint64_t>(i));
    const double x = reference_draw(support_, stream);
    const Vector t = statistic_(x);
    if (t.size() != order_)
      throw Error(ErrorCode::Precondition,
                  fmt::format("t(x) returned {} entries, expected {}", t.size(), order_));
    if (!t.allFinite())
      throw Error(ErrorCode::NonFinite,
                  fmt::format("t(x) is not finite at reference point x={}", x));
    design(i, 0) = 1.0;
    design.row(i).tail(order_) = t.transpose();
  }
  for (Index c = 0; c < design.cols(); ++c)
    design.col(c).normalize();
  const Eigen::JacobiSVD<Matrix> svd(design);
  const auto &sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-10 * sv[0]))
    throw Error(ErrorCode::Degenerate,
                fmt::format("sufficient statistics of '{}' are affinely dependent", label_));
}

ExponentialFamily ExponentialFamily::polynomial(std::vector<int> powers) {
  if (powers.empty())
    throw Error(ErrorCode::Precondition, "polynomial family needs at least one power");
  std::set<int> seen;
  for (int p : powers) {
    if (p < 1)
      throw Error(ErrorCode::Precondition, "polynomial powers must be >= 1");
    if (!seen.insert(p).second)
      throw Error(ErrorCode::Degenerate, fmt::format("duplicate power {}", p));
  }
  const Index d = static_cast<Index>(powers.size());
  ExponentialFamily family(
      fmt::format("polynomial[{}]", fmt::join(powers, ",")), d,
      [powers, d](double x) {
        Vector t(d);
        for (Index j = 0; j < d; ++j)
          t[j] = std::pow(x, powers[static_cast<std::size_t>(j)]);
        return t;
      },
      [](double) { return 0.0; });
  family.powers_ = std::move(powers);
  return family;
}

} // namespace mcig
