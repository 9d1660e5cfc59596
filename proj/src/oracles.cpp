#include "mcig/oracles.hpp"

#include "mcig/error.hpp"
#include "mcig/lse.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace mcig {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class GaussianCumulant final : public Generator {
public:
  Index dim() const noexcept override { return 2; }
  bool in_domain(const Vector &theta) const override {
    return theta.size() == 2 && theta.allFinite() && theta[1] < 0.0;
  }
  DomainInfo domain() const override {
    DomainInfo info;
    info.shape = DomainShape::Box;
    info.lower = Vector::Constant(2, -kInf);
    info.upper = Vector(2);
    info.upper << kInf, 0.0;
    return info;
  }
  Vector interior_point() const override { return Vector{{0.0, -0.5}}; }
  std::string describe() const override { return "gaussian-cumulant"; }

protected:
  double value_impl(const Vector &t) const override {
    return -t[0] * t[0] / (4.0 * t[1]) + 0.5 * std::log(std::numbers::pi / -t[1]);
  }
  Vector gradient_impl(const Vector &t) const override {
    return Vector{{-t[0] / (2.0 * t[1]),
                   t[0] * t[0] / (4.0 * t[1] * t[1]) - 1.0 / (2.0 * t[1])}};
  }
  Matrix hessian_impl(const Vector &t) const override {
    const double t2sq = t[1] * t[1];
    Matrix h(2, 2);
    h(0, 0) = -1.0 / (2.0 * t[1]);
    h(0, 1) = h(1, 0) = t[0] / (2.0 * t2sq);
    h(1, 1) = -t[0] * t[0] / (2.0 * t2sq * t[1]) + 1.0 / (2.0 * t2sq);
    return h;
  }
};

class BinomialCumulant final : public Generator {
public:
  Index dim() const noexcept override { return 1; }
  bool in_domain(const Vector &theta) const override {
    return theta.size() == 1 && std::isfinite(theta[0]);
  }
  Vector interior_point() const override { return Vector::Zero(1); }
  std::string describe() const override { return "binomial-cumulant"; }

protected:
  double value_impl(const Vector &t) const override {
    const double x = t[0];
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  }
  Vector gradient_impl(const Vector &t) const override {
    return Vector::Constant(1, sigmoid(t[0]));
  }
  Matrix hessian_impl(const Vector &t) const override {
    const double s = sigmoid(t[0]);
    const double c = sigmoid(-t[0]);
    return Matrix::Constant(1, 1, s * c);
  }

private:
  static double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
};

// Sign and log |p - p0| from log-densities; sign 0 when they coincide.
std::pair<double, double> signed_log_diff(double lp, double lp0) {
  if (lp == lp0 || (std::isinf(lp) && std::isinf(lp0)))
    return {0.0, -kInf};
  const double hi = std::max(lp, lp0);
  const double lo = std::min(lp, lp0);
  return {lp > lp0 ? 1.0 : -1.0, hi + log1mexp(hi - lo)};
}

} // namespace

GeneratorPtr gaussian_ef_oracle() { return std::make_shared<const GaussianCumulant>(); }

GeneratorPtr binomial_ef_oracle() { return std::make_shared<const BinomialCumulant>(); }

// ---------------------------------------------------------------------------

PefQuadratureOracle::PefQuadratureOracle(std::vector<int> powers, QuadratureOptions options)
    : powers_(std::move(powers)), options_(options) {
  if (powers_.empty())
    throw Error(ErrorCode::Precondition, "polynomial family needs at least one power");
  if (std::set<int>(powers_.begin(), powers_.end()).size() != powers_.size() ||
      *std::min_element(powers_.begin(), powers_.end()) < 1)
    throw Error(ErrorCode::Precondition,
                fmt::format("powers must be distinct and >= 1, got [{}]", fmt::join(powers_, ",")));
  lead_ = static_cast<std::size_t>(
      std::max_element(powers_.begin(), powers_.end()) - powers_.begin());
  if (powers_[lead_] % 2 != 0)
    throw Error(ErrorCode::Precondition,
                fmt::format("highest power {} is odd: the family is never normalizable",
                            powers_[lead_]));
}

bool PefQuadratureOracle::in_domain(const Vector &theta) const {
  return theta.size() == dim() && theta.allFinite() &&
         theta[static_cast<Index>(lead_)] < 0.0;
}

DomainInfo PefQuadratureOracle::domain() const {
  DomainInfo info;
  info.shape = DomainShape::Box;
  info.lower = Vector::Constant(dim(), -kInf);
  info.upper = Vector::Constant(dim(), kInf);
  info.upper[static_cast<Index>(lead_)] = 0.0;
  return info;
}

Vector PefQuadratureOracle::interior_point() const {
  Vector t = Vector::Zero(dim());
  t[static_cast<Index>(lead_)] = -1.0;
  return t;
}

std::string PefQuadratureOracle::describe() const {
  return fmt::format("pef-quadrature[{}]", fmt::join(powers_, ","));
}

double PefQuadratureOracle::exponent(const Vector &theta, double x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < powers_.size(); ++j)
    v += theta[static_cast<Index>(j)] * std::pow(x, powers_[j]);
  return v;
}

PefQuadratureOracle::Window PefQuadratureOracle::window(const Vector &theta) const {
  // Beyond |x| > bound the leading term dominates the exponent and its
  // derivative, so the integrand decreases monotonically outward.
  const double lead = std::abs(theta[static_cast<Index>(lead_)]);
  const int lead_power = powers_[lead_];
  double root_bound = 1.0;
  double slope_bound = 1.0;
  for (std::size_t j = 0; j < powers_.size(); ++j) {
    if (j == lead_)
      continue;
    const double ratio = std::abs(theta[static_cast<Index>(j)]) / lead;
    root_bound += ratio;
    slope_bound += ratio * powers_[j] / lead_power;
  }
  const double bound = std::max(root_bound, slope_bound);

  constexpr int kGrid = 4001;
  std::vector<double> xs(kGrid), phi(kGrid);
  Window w{0.0, 0.0, 0.0, -kInf};
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = -bound + 2.0 * bound * i / (kGrid - 1);
    phi[i] = exponent(theta, xs[i]);
    if (phi[i] > w.peak_log) {
      w.peak_log = phi[i];
      w.peak_x = xs[i];
    }
  }
  const double cutoff = w.peak_log + std::log(kRelativeCutoff);
  int first = 0;
  while (first < kGrid && phi[first] < cutoff)
    ++first;
  int last = kGrid - 1;
  while (last >= 0 && phi[last] < cutoff)
    --last;

  // Outermost crossing of the cutoff, bracketed in [inner, outer].
  auto crossing = [&](double inner, double direction) {
    double outer = inner;
    double step = std::max(1.0, std::abs(inner));
    while (exponent(theta, outer) >= cutoff) {
      outer = inner + direction * step;
      step *= 2.0;
    }
    for (int it = 0; it < 200 && std::abs(outer - inner) > 1e-12 * (1.0 + std::abs(inner)); ++it) {
      const double mid = 0.5 * (inner + outer);
      (exponent(theta, mid) >= cutoff ? inner : outer) = mid;
    }
    return outer;
  };
  w.lower = first == 0 ? crossing(xs[0], -1.0) : xs[first - 1];
  w.upper = last == kGrid - 1 ? crossing(xs[kGrid - 1], 1.0) : xs[last + 1];
  return w;
}

std::pair<double, double> PefQuadratureOracle::truncation(const Vector &theta) const {
  require_domain(theta);
  const Window w = window(theta);
  return {w.lower, w.upper};
}

Vector PefQuadratureOracle::integrate(
    const Vector &theta, Index dim,
    const std::function<void(double, const Vector &, Vector &)> &f, const Window &w) const {
  Vector t(this->dim());
  const VectorIntegrand integrand = [&](double x, Vector &out) {
    const double weight = std::exp(exponent(theta, x) - w.peak_log);
    for (std::size_t j = 0; j < powers_.size(); ++j)
      t[static_cast<Index>(j)] = std::pow(x, powers_[j]);
    f(weight, t, out);
  };
  std::vector<double> breaks;
  constexpr int kPieces = 8;
  for (int i = 0; i <= kPieces; ++i)
    breaks.push_back(w.lower + (w.upper - w.lower) * i / kPieces);
  if (w.peak_x > w.lower && w.peak_x < w.upper)
    breaks.push_back(w.peak_x);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const QuadratureResult r = integrate_adaptive(integrand, dim, breaks, options_);
  if (!r.converged)
    throw Error(ErrorCode::Domain,
                fmt::format("{}: quadrature did not converge at theta = ({}), error {}",
                            describe(), fmt::join(theta.data(), theta.data() + theta.size(), ", "),
                            r.abs_error));
  return r.value;
}

double PefQuadratureOracle::value_impl(const Vector &theta) const {
  const Window w = window(theta);
  const Vector z = integrate(
      theta, 1, [](double weight, const Vector &, Vector &out) { out[0] = weight; }, w);
  return w.peak_log + std::log(z[0]);
}

Vector PefQuadratureOracle::gradient_impl(const Vector &theta) const {
  const Window w = window(theta);
  const Index d = dim();
  const Vector z = integrate(
      theta, d + 1,
      [d](double weight, const Vector &t, Vector &out) {
        out[0] = weight;
        out.tail(d) = weight * t;
      },
      w);
  return z.tail(d) / z[0];
}

Matrix PefQuadratureOracle::hessian_impl(const Vector &theta) const {
  const Window w = window(theta);
  const Index d = dim();
  const Vector mean = gradient_impl(theta);
  const Index pairs = d * (d + 1) / 2;
  const Vector z = integrate(
      theta, pairs + 1,
      [&](double weight, const Vector &t, Vector &out) {
        out[0] = weight;
        const Vector c = t - mean;
        Index at = 1;
        for (Index i = 0; i < d; ++i)
          for (Index j = i; j < d; ++j)
            out[at++] = weight * c[i] * c[j];
      },
      w);
  Matrix h(d, d);
  Index at = 1;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      h(i, j) = h(j, i) = z[at++] / z[0];
  return h;
}

std::shared_ptr<const PefQuadratureOracle> pef_quadrature_oracle(std::vector<int> powers) {
  return std::make_shared<const PefQuadratureOracle>(std::move(powers));
}

// ---------------------------------------------------------------------------

MixtureNegentropyOracle::MixtureNegentropyOracle(MixtureFamily family, QuadratureOptions options)
    : family_(std::move(family)), options_(options) {
  // Map the real line around the components' locations and widest scale.
  double lo = kInf, hi = -kInf, scale = 0.0;
  for (const auto &c : family_.components()) {
    if (!c.support().is_real_line())
      throw Error(ErrorCode::Precondition,
                  "the negentropy oracle integrates over the real line only");
    if (c.spec()) {
      lo = std::min(lo, c.spec()->location);
      hi = std::max(hi, c.spec()->location);
      scale = std::max(scale, c.spec()->scale);
    }
  }
  if (std::isfinite(lo)) {
    center_ = 0.5 * (lo + hi);
    scale_ = std::max({1.0, scale, 0.5 * (hi - lo)});
  }
}

bool MixtureNegentropyOracle::in_domain(const Vector &eta) const {
  return eta.size() == dim() && in_open_simplex(eta, 1e-12);
}

DomainInfo MixtureNegentropyOracle::domain() const {
  DomainInfo info;
  info.shape = DomainShape::OpenSimplex;
  info.margin = 1e-12;
  return info;
}

Vector MixtureNegentropyOracle::interior_point() const {
  return Vector::Constant(dim(), 1.0 / static_cast<double>(dim() + 1));
}

std::string MixtureNegentropyOracle::describe() const {
  return fmt::format("negentropy-quadrature[{}]", family_.fingerprint());
}

Vector MixtureNegentropyOracle::integrate(Index dim, const VectorIntegrand &f) const {
  const QuadratureResult r = integrate_real_line(f, dim, center_, scale_, options_);
  if (!r.converged)
    throw Error(ErrorCode::NoSolution,
                fmt::format("{}: quadrature did not converge (error {})", describe(),
                            r.abs_error));
  return r.value;
}

namespace {

struct MixturePoint {
  std::vector<double> log_p;
  double log_m;
};

MixturePoint evaluate_mixture(const MixtureFamily &family, const Vector &log_w, double x) {
  MixturePoint pt;
  pt.log_p.resize(family.components().size());
  std::vector<double> terms(pt.log_p.size());
  for (std::size_t j = 0; j < pt.log_p.size(); ++j) {
    pt.log_p[j] = family.components()[j].log_density(x);
    terms[j] = log_w[static_cast<Index>(j)] + pt.log_p[j];
  }
  pt.log_m = log_sum_exp(terms);
  return pt;
}

Vector mixture_log_weights(const Vector &eta) {
  Vector log_w(eta.size() + 1);
  log_w[0] = std::log1p(-eta.sum());
  log_w.tail(eta.size()) = eta.array().log();
  return log_w;
}

} // namespace

double MixtureNegentropyOracle::value_impl(const Vector &eta) const {
  const Vector log_w = mixture_log_weights(eta);
  return integrate(1, [&](double x, Vector &out) {
    const MixturePoint pt = evaluate_mixture(family_, log_w, x);
    out[0] = std::isfinite(pt.log_m) ? std::exp(pt.log_m) * pt.log_m : 0.0;
  })[0];
}

Vector MixtureNegentropyOracle::gradient_impl(const Vector &eta) const {
  const Vector log_w = mixture_log_weights(eta);
  const Index d = dim();
  return integrate(d, [&](double x, Vector &out) {
    const MixturePoint pt = evaluate_mixture(family_, log_w, x);
    out.setZero();
    if (!std::isfinite(pt.log_m))
      return;
    for (Index j = 0; j < d; ++j) {
      const auto [sign, lad] = signed_log_diff(pt.log_p[static_cast<std::size_t>(j + 1)], pt.log_p[0]);
      out[j] = sign * std::exp(lad) * (1.0 + pt.log_m);
    }
  });
}

Matrix MixtureNegentropyOracle::hessian_impl(const Vector &eta) const {
  const Vector log_w = mixture_log_weights(eta);
  const Index d = dim();
  const Index pairs = d * (d + 1) / 2;
  const Vector z = integrate(pairs, [&](double x, Vector &out) {
    const MixturePoint pt = evaluate_mixture(family_, log_w, x);
    out.setZero();
    if (!std::isfinite(pt.log_m))
      return;
    Vector v(d);
    for (Index j = 0; j < d; ++j) {
      const auto [sign, lad] = signed_log_diff(pt.log_p[static_cast<std::size_t>(j + 1)], pt.log_p[0]);
      v[j] = sign * std::exp(lad - 0.5 * pt.log_m);
    }
    Index at = 0;
    for (Index i = 0; i < d; ++i)
      for (Index j = i; j < d; ++j)
        out[at++] = v[i] * v[j];
  });
  Matrix h(d, d);
  Index at = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      h(i, j) = h(j, i) = z[at++];
  return h;
}

double MixtureNegentropyOracle::kl(const Vector &eta1, const Vector &eta2) const {
  require_domain(eta1);
  require_domain(eta2);
  const Vector lw1 = mixture_log_weights(eta1);
  const Vector lw2 = mixture_log_weights(eta2);
  return integrate(1, [&](double x, Vector &out) {
    const MixturePoint p1 = evaluate_mixture(family_, lw1, x);
    const MixturePoint p2 = evaluate_mixture(family_, lw2, x);
    out[0] = std::isfinite(p1.log_m) && std::isfinite(p2.log_m)
                 ? std::exp(p1.log_m) * (p1.log_m - p2.log_m)
                 : 0.0;
  })[0];
}

std::shared_ptr<const MixtureNegentropyOracle>
mixture_negentropy_oracle(const MixtureFamily &family) {
  return std::make_shared<const MixtureNegentropyOracle>(family);
}

} // namespace mcig
