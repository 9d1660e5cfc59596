#include "mcig/geometry.hpp"

#include "mcig/families.hpp"

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <limits>

namespace mcig {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string show(const Vector &v) {
  return fmt::format("({})", fmt::join(v.data(), v.data() + v.size(), ", "));
}

double raw_bregman(const Generator &g, const Vector &t1, const Vector &t2) {
  return g.value(t1) - g.value(t2) - (t1 - t2).dot(g.gradient(t2));
}

// Domain test used by the inversion: simplex spaces keep a margin.
class Region {
public:
  Region(const Generator &g, const InversionSettings &s) : g_(g), info_(g.domain()) {
    margin_ = info_.shape == DomainShape::OpenSimplex ? std::max(s.boundary_margin, info_.margin)
                                                      : 0.0;
  }
  [[nodiscard]] bool contains(const Vector &theta) const {
    if (!theta.allFinite() || !g_.in_domain(theta))
      return false;
    return info_.shape != DomainShape::OpenSimplex || in_open_simplex(theta, margin_ * 0.999);
  }
  [[nodiscard]] bool simplex() const { return info_.shape == DomainShape::OpenSimplex; }
  [[nodiscard]] const DomainInfo &info() const { return info_; }
  [[nodiscard]] double margin() const { return margin_; }

  /// One-dimensional open interval of admissible points.
  [[nodiscard]] std::pair<double, double> interval() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (info_.shape) {
    case DomainShape::Unbounded:
      return {-inf, inf};
    case DomainShape::Box:
      return {info_.lower[0], info_.upper[0]};
    case DomainShape::OpenSimplex:
      return {margin_, 1.0 - margin_};
    }
    return {-inf, inf};
  }

private:
  const Generator &g_;
  DomainInfo info_;
  double margin_ = 0.0;
};

struct Iterate {
  Vector theta;
  Vector residual;
  double norm;  // Euclidean, for the line search
  double max;   // max-norm, for convergence
};

Iterate make_iterate(const Generator &g, Vector theta, const Vector &eta) {
  Vector r = g.gradient(theta) - eta;
  const double norm = r.norm();
  const double max = r.cwiseAbs().maxCoeff();
  return {std::move(theta), std::move(r), norm, max};
}

// One damped Newton step; returns false if no step length reduces the
// residual inside the domain.
bool newton_step(const Generator &g, const Region &region, const Vector &eta, Iterate &it) {
  const Matrix h = g.hessian(it.theta);
  Vector step;
  const Eigen::LLT<Matrix> llt(h);
  if (llt.info() == Eigen::Success) {
    step = llt.solve(it.residual);
  } else {
    step = h.ldlt().solve(it.residual);
  }
  if (!step.allFinite())
    return false;
  double t = 1.0;
  for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
    Vector candidate = it.theta - t * step;
    if (!region.contains(candidate))
      continue;
    Iterate next = make_iterate(g, std::move(candidate), eta);
    if (next.norm < it.norm) {
      it = std::move(next);
      return true;
    }
  }
  return false;
}

// Bisection on the strictly increasing derivative of a 1-D generator.
std::optional<Iterate> bisect(const Generator &g, const Region &region, const Vector &eta,
                              const Vector &start, const InversionSettings &s, bool &clamped) {
  const auto [lower, upper] = region.interval();
  auto derivative = [&](double x) { return g.gradient(Vector::Constant(1, x))[0] - eta[0]; };
  double x0 = start[0];
  double f0 = derivative(x0);
  if (f0 == 0.0)
    return make_iterate(g, Vector::Constant(1, x0), eta);

  // Grow a bracket away from x0: geometric steps toward an infinite bound,
  // halving the remaining distance toward a finite one.
  const double direction = f0 < 0.0 ? 1.0 : -1.0;
  const double bound = direction > 0.0 ? upper : lower;
  double inner = x0;
  double outer = x0;
  double step = 1.0;
  bool bracketed = false;
  for (int i = 0; i < 200; ++i) {
    double candidate;
    if (std::isfinite(bound)) {
      candidate = outer + 0.5 * (bound - outer);
      if (region.simplex() && i == 199)
        candidate = bound;
    } else {
      candidate = outer + direction * step;
      step *= 2.0;
    }
    if (candidate == outer)
      break;
    const double fc = derivative(candidate);
    if (!std::isfinite(fc))
      break;
    if ((fc >= 0.0) == (direction > 0.0)) {
      outer = candidate;
      bracketed = true;
      break;
    }
    inner = candidate;
    outer = candidate;
  }
  if (!bracketed) {
    if (region.simplex()) {
      // The solution lies beyond the margin: clamp onto it.
      clamped = true;
      return make_iterate(g, Vector::Constant(1, bound), eta);
    }
    return std::nullopt;
  }
  double lo = std::min(inner, outer);
  double hi = std::max(inner, outer);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double fm = derivative(mid);
    if (std::abs(fm) <= s.tolerance * 1e-3)
      return make_iterate(g, Vector::Constant(1, mid), eta);
    (fm < 0.0 ? lo : hi) = mid;
  }
  const double flo = std::abs(derivative(lo));
  const double fhi = std::abs(derivative(hi));
  return make_iterate(g, Vector::Constant(1, flo <= fhi ? lo : hi), eta);
}

} // namespace

InversionError::InversionError(const std::string &message, Vector last_point, double residual)
    : Error(ErrorCode::NoSolution, message), last_point_(std::move(last_point)),
      residual_(residual) {}

DuallyFlatSpace::DuallyFlatSpace(GeneratorPtr generator, InversionSettings settings)
    : generator_(std::move(generator)), settings_(settings) {
  if (!generator_)
    throw Error(ErrorCode::Precondition, "dually flat space needs a generator");
  if (!(settings_.tolerance > 0.0) || settings_.max_iterations < 1 ||
      !(settings_.boundary_margin >= 0.0))
    throw Error(ErrorCode::Precondition, "invalid inversion settings");
}

double bregman_divergence(const DuallyFlatSpace &space, const Vector &theta1,
                          const Vector &theta2) {
  return std::max(0.0, raw_bregman(space.generator(), theta1, theta2));
}

Vector dual_coordinates(const DuallyFlatSpace &space, const Vector &theta) {
  return space.generator().gradient(theta);
}

InversionResult primal_coordinates(const DuallyFlatSpace &space, const Vector &eta,
                                   const std::optional<Vector> &start) {
  const Generator &g = space.generator();
  const InversionSettings &s = space.settings();
  if (eta.size() != g.dim())
    throw Error(ErrorCode::Precondition,
                fmt::format("dual point has size {}, expected {}", eta.size(), g.dim()));
  if (!eta.allFinite())
    throw Error(ErrorCode::Domain, "dual point is not finite");
  const Region region(g, s);

  Vector theta0 = start && start->size() == g.dim() && region.contains(*start)
                      ? *start
                      : g.interior_point();
  Iterate it = make_iterate(g, std::move(theta0), eta);
  int iterations = 0;
  while (it.max > s.tolerance && iterations < s.max_iterations) {
    if (!newton_step(g, region, eta, it))
      break;
    ++iterations;
  }

  bool clamped = false;
  if (it.max > s.tolerance && g.dim() == 1) {
    if (auto found = bisect(g, region, eta, it.theta, s, clamped)) {
      if (found->norm < it.norm || clamped)
        it = std::move(*found);
    }
  }

  if (it.max <= s.tolerance && !clamped) {
    // Polish: Newton converges quadratically, so a few extra steps take the
    // residual to rounding level.
    for (int extra = 0; extra < 3 && it.max > 0.0; ++extra)
      if (!newton_step(g, region, eta, it))
        break;
  }

  if (it.max > s.tolerance && !clamped) {
    if (region.simplex()) {
      // A stalled iterate pinned at the margin is the clamped solution.
      const double slack =
          std::min(it.theta.minCoeff(), 1.0 - it.theta.sum()) - region.margin();
      if (slack < 1e-6)
        clamped = true;
    }
    if (!clamped)
      throw InversionError(
          fmt::format("{}: no primal point with gradient {} (last residual {:.3g} after {} "
                      "iterations)",
                      g.describe(), show(eta), it.max, iterations),
          it.theta, it.max);
  }
  return {std::move(it.theta), it.max, iterations, clamped};
}

double dual_potential(const DuallyFlatSpace &space, const Vector &eta) {
  const InversionResult r = primal_coordinates(space, eta);
  return eta.dot(r.point) - space.generator().value(r.point);
}

double dual_bregman_divergence(const DuallyFlatSpace &space, const Vector &eta1,
                               const Vector &eta2) {
  const InversionResult r1 = primal_coordinates(space, eta1);
  const InversionResult r2 = primal_coordinates(space, eta2);
  const Generator &g = space.generator();
  const double f1 = eta1.dot(r1.point) - g.value(r1.point);
  const double f2 = eta2.dot(r2.point) - g.value(r2.point);
  return std::max(0.0, f1 - f2 - (eta1 - eta2).dot(r2.point));
}

GeodesicPoint geodesic(const DuallyFlatSpace &space, const Vector &p, const Vector &q,
                       double lambda, GeodesicKind kind) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::Precondition, fmt::format("lambda = {} outside [0, 1]", lambda));
  const Generator &g = space.generator();
  g.require_domain(p);
  g.require_domain(q);
  GeodesicPoint out;
  out.lambda = lambda;
  if (lambda == 0.0 || lambda == 1.0) {
    out.primal = lambda == 0.0 ? p : q;
    out.dual = g.gradient(out.primal);
    return out;
  }
  const Vector straight = (1.0 - lambda) * p + lambda * q;
  if (kind == GeodesicKind::Primal) {
    out.primal = straight;
    out.dual = g.gradient(straight);
  } else {
    out.dual = (1.0 - lambda) * g.gradient(p) + lambda * g.gradient(q);
    out.primal = primal_coordinates(space, out.dual, straight).point;
  }
  return out;
}

double skew_jensen(const DuallyFlatSpace &space, const Vector &p, const Vector &q,
                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::Precondition, fmt::format("alpha = {} outside (0, 1)", alpha));
  const Generator &g = space.generator();
  const double j = (1.0 - alpha) * g.value(p) + alpha * g.value(q) -
                   g.value((1.0 - alpha) * p + alpha * q);
  return std::max(0.0, j);
}

double jeffreys_divergence(const DuallyFlatSpace &space, const Vector &p, const Vector &q) {
  const Generator &g = space.generator();
  const double fp = g.value(p);
  const double fq = g.value(q);
  const Vector gp = g.gradient(p);
  const Vector gq = g.gradient(q);
  const double cross_pq = (p - q).dot(gq);
  const double cross_qp = (q - p).dot(gp);
  const double b_pq = fp - fq - cross_pq;
  const double b_qp = fq - fp - cross_qp;
  const double sum = b_pq + b_qp;
  const double inner = (p - q).dot(gp - gq);
  const double floor = 64.0 * kEps * (2.0 * (std::abs(fp) + std::abs(fq)) +
                                      std::abs(cross_pq) + std::abs(cross_qp));
  if (std::abs(sum - inner) > 1e-10 * std::abs(inner) + floor)
    throw Error(ErrorCode::Algorithm,
                fmt::format("Jeffreys identity violated: B + B* = {} but <dtheta, deta> = {}",
                            sum, inner));
  return std::max(0.0, b_pq) + std::max(0.0, b_qp);
}

double jeffreys_skew(const DuallyFlatSpace &space, const Vector &p, const Vector &q,
                     double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5))
    throw Error(ErrorCode::Precondition, fmt::format("alpha = {} outside (0, 1/2]", alpha));
  return (skew_jensen(space, p, q, alpha) + skew_jensen(space, p, q, 1.0 - alpha)) / alpha;
}

double crouzeix_deviation(const DuallyFlatSpace &space, const Vector &theta) {
  const Generator &g = space.generator();
  const Matrix h = g.hessian(theta);
  const InversionResult back = primal_coordinates(space, g.gradient(theta));
  const Matrix h_back = g.hessian(back.point);
  const Eigen::LLT<Matrix> llt(h_back);
  if (llt.info() != Eigen::Success || !is_spd(h_back))
    throw Error(ErrorCode::NotSpd,
                fmt::format("Hessian at {} is singular; no dual metric", show(back.point)));
  // H(theta) H(theta_hat)^{-1} = (H(theta_hat)^{-1} H(theta))^T for symmetric H.
  const Matrix product = llt.solve(h).transpose();
  return (product - Matrix::Identity(g.dim(), g.dim())).cwiseAbs().maxCoeff();
}

} // namespace mcig
