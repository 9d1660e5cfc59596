#pragma once

#include "mcig/families.hpp"
#include "mcig/types.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mcig::testing {

/// (1 - eta) N(0, 3) + eta N(2, 1).
inline MixtureFamily two_gaussian_family() {
  return MixtureFamily({ComponentDensity::gaussian(0.0, 3.0), ComponentDensity::gaussian(2.0, 1.0)});
}

/// Gaussian(-2, 1), Laplace(0, 1), Cauchy(2, 1): a D = 2 mixture family.
inline MixtureFamily three_kind_family() {
  return MixtureFamily({ComponentDensity::gaussian(-2.0, 1.0), ComponentDensity::laplace(0.0, 1.0),
                        ComponentDensity::cauchy(2.0, 1.0)});
}

/// Natural parameters of N(mu, sigma^2) for t(x) = (x, x^2).
inline Vector gaussian_theta(double mu, double sigma) {
  return Vector{{mu / (sigma * sigma), -1.0 / (2.0 * sigma * sigma)}};
}

/// KL(N(mu1, s1^2) : N(mu2, s2^2)).
inline double gaussian_kl(double mu1, double s1, double mu2, double s2) {
  return std::log(s2 / s1) + (s1 * s1 + (mu1 - mu2) * (mu1 - mu2)) / (2.0 * s2 * s2) - 0.5;
}

inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double laplace_pdf(double x, double mu, double b) {
  return std::exp(-std::abs(x - mu) / b) / (2.0 * b);
}

inline double cauchy_pdf(double x, double x0, double gamma) {
  const double z = (x - x0) / gamma;
  return 1.0 / (std::numbers::pi * gamma * (1.0 + z * z));
}

class Random {
public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Vector uniform_vector(Index d, double lo, double hi) {
    Vector v(d);
    for (Index i = 0; i < d; ++i)
      v[i] = uniform(lo, hi);
    return v;
  }
  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace mcig::testing
