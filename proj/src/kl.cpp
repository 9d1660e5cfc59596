#include "mcig/kl.hpp"

#include "mcig/error.hpp"
#include "mcig/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace mcig {

double extended_kl_term(double y) {
  if (std::abs(y) < 0.1) {
    // y^2/2 - y^3/6 + y^4/24 - ...; truncation error below 1e-16 relative.
    double term = y * y / 2.0;
    double sum = term;
    for (int k = 3; k <= 14; ++k) {
      term *= -y / k;
      sum += term;
    }
    return sum;
  }
  return std::max(0.0, y + std::expm1(-y));
}

double mc_kl_estimate(const ComponentDensity &p, const ComponentDensity &q, Index m, Seed seed,
                      KlVariant variant) {
  if (m < 1)
    throw Error(ErrorCode::Precondition, fmt::format("sample size must be >= 1, got {}", m));
  std::vector<double> log_ratio(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    VariateStream stream(seed, i);
    const double x = p.sample(stream);
    log_ratio[i] = p.log_density(x) - q.log_density(x);
  });
  for (std::size_t i = 0; i < log_ratio.size(); ++i)
    if (!std::isfinite(log_ratio[i]))
      throw Error(ErrorCode::NonFinite,
                  fmt::format("variate {}: log p(x) - log q(x) is not finite", i));
  const double sum = tree_reduce<double>(log_ratio.size(), 0.0, [&](std::size_t i, double &acc) {
    acc += variant == KlVariant::Naive ? log_ratio[i] : extended_kl_term(log_ratio[i]);
  });
  return sum / static_cast<double>(m);
}

} // namespace mcig
