#include "mcig/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mcig {

Vector relative_steps(const Vector &theta, double step) {
  return step * theta.cwiseAbs().cwiseMax(1.0);
}

Vector curvature_steps(const Generator &g, const Vector &theta, double step) {
  const Vector diag = g.hessian(theta).diagonal();
  Vector h = relative_steps(theta, step);
  for (Index i = 0; i < h.size(); ++i)
    if (diag[i] > 0.0)
      h[i] = std::min(h[i], step / std::sqrt(diag[i]));
  return h;
}

Vector fd_gradient(const Generator &g, const Vector &theta, const Vector &steps) {
  Vector grad(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    const double h = steps[i];
    auto at = [&](double offset) {
      Vector t = theta;
      t[i] += offset;
      return g.value(t);
    };
    grad[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return grad;
}

Matrix fd_hessian(const Generator &g, const Vector &theta, const Vector &steps) {
  const Index d = theta.size();
  Matrix h(d, d);
  for (Index i = 0; i < d; ++i) {
    const double hi = steps[i];
    auto at = [&](double offset) {
      Vector t = theta;
      t[i] += offset;
      return g.gradient(t);
    };
    h.col(i) = (-at(2 * hi) + 8 * at(hi) - 8 * at(-hi) + at(-2 * hi)) / (12 * hi);
  }
  return 0.5 * (h + h.transpose());
}

Vector random_simplex_point(VariateStream &stream, Index dim, double shrink) {
  // Normalized exponential spacings give a flat Dirichlet over D+1 weights;
  // the first weight is the implicit reference component.
  Vector e(dim + 1);
  for (Index i = 0; i <= dim; ++i)
    e[i] = -std::log(stream.uniform());
  e /= e.sum();
  const Vector u = e.tail(dim);
  return (1.0 - shrink) * u + shrink * Vector::Constant(dim, 1.0 / static_cast<double>(dim + 1));
}

double min_eigenvalue(const Matrix &h) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double scaled_min_eigenvalue(const Matrix &h) {
  const Vector diag = h.diagonal();
  if (!(diag.minCoeff() > 0.0))
    return diag.minCoeff();
  const Vector s = diag.cwiseSqrt().cwiseInverse();
  return min_eigenvalue(s.asDiagonal() * h * s.asDiagonal());
}

DerivativeReport check_derivatives(const Generator &g, const Vector &theta,
                                   const Vector &steps) {
  DerivativeReport r;
  const Matrix h = g.hessian(theta);
  r.gradient_error = relative_error(g.gradient(theta), fd_gradient(g, theta, steps));
  r.hessian_error = relative_error(h, fd_hessian(g, theta, steps));
  r.symmetry_error = (h - h.transpose()).cwiseAbs().maxCoeff();
  r.min_eigenvalue = min_eigenvalue(h);
  r.scaled_min_eigenvalue = scaled_min_eigenvalue(h);
  return r;
}

DerivativeReport check_derivatives(const Generator &g, const Vector &theta) {
  return check_derivatives(g, theta, curvature_steps(g, theta));
}

} // namespace mcig
