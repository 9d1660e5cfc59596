#include "mcig/generator.hpp"

#include "mcig/error.hpp"

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>

namespace mcig {

void Generator::require_domain(const Vector &theta) const {
  if (theta.size() != dim())
    throw Error(ErrorCode::Precondition,
                fmt::format("{}: expected a {}-vector, got size {}", describe(), dim(),
                            theta.size()));
  if (!theta.allFinite() || !in_domain(theta))
    throw Error(ErrorCode::Domain,
                fmt::format("{}: parameter ({}) is outside the domain", describe(),
                            fmt::join(theta.data(), theta.data() + theta.size(), ", ")));
}

double Generator::value(const Vector &theta) const {
  require_domain(theta);
  return value_impl(theta);
}

Vector Generator::gradient(const Vector &theta) const {
  require_domain(theta);
  return gradient_impl(theta);
}

Matrix Generator::hessian(const Vector &theta) const {
  require_domain(theta);
  return hessian_impl(theta);
}

bool is_spd(const Matrix &h, double relative_floor) {
  if (h.rows() != h.cols() || h.rows() == 0 || !h.allFinite())
    return false;
  const Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success)
    return false;
  const Matrix &l = llt.matrixLLT();
  for (Index i = 0; i < h.rows(); ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot > relative_floor * h(i, i)))
      return false;
  }
  return true;
}

double relative_error(const Matrix &a, const Matrix &b) {
  const double scale = b.cwiseAbs().maxCoeff();
  const double diff = (a - b).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

double relative_error(double a, double b) {
  const double scale = std::abs(b);
  return scale > 0.0 ? std::abs(a - b) / scale : std::abs(a - b);
}

AffineShiftedGenerator::AffineShiftedGenerator(GeneratorPtr base, Vector slope,
                                               double intercept)
    : base_(std::move(base)), slope_(std::move(slope)), intercept_(intercept) {
  if (!base_)
    throw Error(ErrorCode::Precondition, "affine shim needs a base generator");
  if (slope_.size() != base_->dim())
    throw Error(ErrorCode::Precondition, "affine slope dimension mismatch");
}

std::string AffineShiftedGenerator::describe() const {
  return fmt::format("affine({})", base_->describe());
}

double AffineShiftedGenerator::value_impl(const Vector &theta) const {
  return base_->value(theta) + slope_.dot(theta) + intercept_;
}

Vector AffineShiftedGenerator::gradient_impl(const Vector &theta) const {
  return base_->gradient(theta) + slope_;
}

Matrix AffineShiftedGenerator::hessian_impl(const Vector &theta) const {
  return base_->hessian(theta);
}

LinearCombinationGenerator::LinearCombinationGenerator(
    std::vector<std::pair<double, GeneratorPtr>> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty())
    throw Error(ErrorCode::Precondition, "linear combination needs at least one term");
  for (const auto &[lambda, g] : terms_) {
    if (!g)
      throw Error(ErrorCode::Precondition, "linear combination term is null");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw Error(ErrorCode::Precondition,
                  fmt::format("linear combination weights must be positive, got {}", lambda));
    if (g->dim() != terms_.front().second->dim())
      throw Error(ErrorCode::Precondition, "linear combination terms differ in dimension");
  }
}

bool LinearCombinationGenerator::in_domain(const Vector &theta) const {
  for (const auto &term : terms_)
    if (!term.second->in_domain(theta))
      return false;
  return true;
}

std::string LinearCombinationGenerator::describe() const {
  std::string out = "combination(";
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out += fmt::format("{}{}*{}", i ? " + " : "", terms_[i].first,
                       terms_[i].second->describe());
  return out + ")";
}

double LinearCombinationGenerator::value_impl(const Vector &theta) const {
  double v = 0.0;
  for (const auto &[lambda, g] : terms_)
    v += lambda * g->value(theta);
  return v;
}

Vector LinearCombinationGenerator::gradient_impl(const Vector &theta) const {
  Vector v = Vector::Zero(dim());
  for (const auto &[lambda, g] : terms_)
    v += lambda * g->gradient(theta);
  return v;
}

Matrix LinearCombinationGenerator::hessian_impl(const Vector &theta) const {
  Matrix h = Matrix::Zero(dim(), dim());
  for (const auto &[lambda, g] : terms_)
    h += lambda * g->hessian(theta);
  return h;
}

} // namespace mcig
