#include "mcig/lse.hpp"

#include "mcig/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcig {
namespace {

void reject_non_finite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::isnan(x[i]) || x[i] == std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::NonFinite, "lse0+ argument " + std::to_string(i) +
                                            " is not finite");
}

// max(0, x_1, ..., x_d): the shift for the implicit zero argument.
double shift_with_zero(std::span<const double> x) {
  double shift = 0.0;
  for (double v : x)
    shift = std::max(shift, v);
  return shift;
}

} // namespace

double log_sum_exp(std::span<const double> x) {
  if (x.empty())
    return -std::numeric_limits<double>::infinity();
  const double shift = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(shift))
    return shift;
  double sum = 0.0;
  for (double v : x)
    sum += std::exp(v - shift);
  return shift + std::log(sum);
}

double lse0p(std::span<const double> x) {
  reject_non_finite(x);
  if (x.empty())
    return 0.0;
  const double shift = shift_with_zero(x);
  double sum = std::exp(-shift);
  for (double v : x)
    sum += std::exp(v - shift);
  return shift + std::log(sum);
}

Vector lse0p_grad(std::span<const double> x) {
  reject_non_finite(x);
  const double shift = shift_with_zero(x);
  double sum = std::exp(-shift);
  Vector s(static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[static_cast<Index>(i)] = std::exp(x[i] - shift);
    sum += s[static_cast<Index>(i)];
  }
  return s / sum;
}

Matrix lse0p_hess(std::span<const double> x) {
  reject_non_finite(x);
  const Index d = static_cast<Index>(x.size());
  const double shift = shift_with_zero(x);
  Vector e(d);
  for (Index i = 0; i < d; ++i)
    e[i] = std::exp(x[static_cast<std::size_t>(i)] - shift);
  const double e0 = std::exp(-shift);
  const double total = e0 + e.sum();
  const Vector s = e / total;
  Matrix h = -s * s.transpose();
  // 1 - s_i written as (e0 + sum_{k != i} e_k) / total: no cancellation.
  for (Index i = 0; i < d; ++i) {
    double rest = e0;
    for (Index k = 0; k < d; ++k)
      if (k != i)
        rest += e[k];
    h(i, i) = s[i] * (rest / total);
  }
  return h;
}

double log1mexp(double a) {
  if (a < 0.0)
    throw Error(ErrorCode::Domain, "log1mexp requires a non-negative argument");
  // Maechler's switch point ln 2.
  return a <= 0.6931471805599453 ? std::log(-std::expm1(-a))
                                 : std::log1p(-std::exp(-a));
}

} // namespace mcig
