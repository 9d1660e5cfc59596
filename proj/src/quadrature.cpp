#include "mcig/quadrature.hpp"

#include "mcig/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace mcig {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a;
  double b;
  Vector value;
  double error;
};

struct ByError {
  bool operator()(const Piece &lhs, const Piece &rhs) const {
    return lhs.error < rhs.error;
  }
};

Piece gauss_kronrod(const VectorIntegrand &f, Index dim, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Vector kronrod = Vector::Zero(dim);
  Vector gauss = Vector::Zero(dim);
  Vector fx(dim);
  for (int k = 0; k < 8; ++k) {
    const double dx = half * kKronrodNodes[k];
    const int evaluations = k == 7 ? 1 : 2;
    for (int side = 0; side < evaluations; ++side) {
      f(side == 0 ? mid - dx : mid + dx, fx);
      kronrod.noalias() += kKronrodWeights[k] * fx;
      if (k % 2 == 1)
        gauss.noalias() += kGaussWeights[k / 2] * fx;
    }
  }
  kronrod *= half;
  gauss *= half;
  const double error = (kronrod - gauss).cwiseAbs().maxCoeff();
  return Piece{a, b, std::move(kronrod), error};
}

} // namespace

QuadratureResult integrate_adaptive(const VectorIntegrand &f, Index dim,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions &options) {
  if (breakpoints.size() < 2)
    throw Error(ErrorCode::Precondition, "quadrature needs at least two breakpoints");

  std::priority_queue<Piece, std::vector<Piece>, ByError> queue;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Piece p = gauss_kronrod(f, dim, breakpoints[i], breakpoints[i + 1]);
    total_error += p.error;
    queue.push(std::move(p));
  }

  QuadratureResult result;
  while (total_error > options.abs_tolerance &&
         static_cast<int>(queue.size()) < options.max_intervals) {
    Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(std::move(worst));
      break;
    }
    Piece left = gauss_kronrod(f, dim, worst.a, mid);
    Piece right = gauss_kronrod(f, dim, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }

  // Sum in position order so the result does not depend on heap layout.
  std::vector<Piece> pieces;
  pieces.reserve(queue.size());
  while (!queue.empty()) {
    pieces.push_back(queue.top());
    queue.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece &l, const Piece &r) { return l.a < r.a; });
  result.value = Vector::Zero(dim);
  result.abs_error = 0.0;
  for (const auto &p : pieces) {
    result.value += p.value;
    result.abs_error += p.error;
  }
  result.intervals = static_cast<int>(pieces.size());
  result.converged = result.abs_error <= options.abs_tolerance &&
                     result.value.allFinite();
  return result;
}

QuadratureResult integrate_real_line(const VectorIntegrand &f, Index dim,
                                     double center, double scale,
                                     const QuadratureOptions &options) {
  if (!(scale > 0.0))
    throw Error(ErrorCode::Precondition, "real-line quadrature scale must be positive");
  Vector inner(dim);
  VectorIntegrand mapped = [&](double t, Vector &out) {
    const double one_minus = 1.0 - t * t;
    const double x = center + scale * t / one_minus;
    const double jacobian = scale * (1.0 + t * t) / (one_minus * one_minus);
    if (!std::isfinite(x) || !std::isfinite(jacobian)) {
      out.setZero();
      return;
    }
    f(x, inner);
    out = jacobian * inner;
  };
  const std::array<double, 9> breaks = {-1.0, -0.9, -0.6, -0.3, 0.0,
                                        0.3,  0.6,  0.9,  1.0};
  return integrate_adaptive(mapped, dim, breaks, options);
}

double integrate_scalar(const std::function<double(double)> &f, double a,
                        double b, const QuadratureOptions &options) {
  const std::array<double, 2> breaks = {a, b};
  const auto result = integrate_adaptive(
      [&](double x, Vector &out) { out[0] = f(x); }, 1, breaks, options);
  if (!result.converged)
    throw Error(ErrorCode::NoSolution, "scalar quadrature did not converge");
  return result.value[0];
}

} // namespace mcig
