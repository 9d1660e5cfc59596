#include "mcig/mc_mixture_generator.hpp"

#include "mcig/error.hpp"
#include "mcig/lse.hpp"
#include "mcig/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace mcig {
namespace {

// log m(x_l; eta) from the cached component log-densities.
double log_mixture(const Matrix &log_p, Index l, const Vector &log_w) {
  double shift = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < log_p.rows(); ++j)
    shift = std::max(shift, log_w[j] + log_p(j, l));
  double sum = 0.0;
  for (Index j = 0; j < log_p.rows(); ++j)
    sum += std::exp(log_w[j] + log_p(j, l) - shift);
  return shift + std::log(sum);
}

Vector log_weights(const Vector &eta) {
  Vector log_w(eta.size() + 1);
  log_w[0] = std::log1p(-eta.sum());
  log_w.tail(eta.size()) = eta.array().log();
  return log_w;
}

} // namespace

McMixtureGenerator::McMixtureGenerator(const MixtureFamily &family, const SampleSet &sample)
    : dim_(family.order()), sample_size_(sample.size()), fingerprint_(family.fingerprint()) {
  const auto &cache = sample.mixture_cache();
  if (cache.family_fingerprint != fingerprint_)
    throw Error(ErrorCode::Precondition,
                fmt::format("sample cache was built for family '{}', not '{}'",
                            cache.family_fingerprint, fingerprint_));
  const Index m = sample.size();
  if (m < dim_)
    throw Error(ErrorCode::Degenerate,
                fmt::format("m = {} < D = {}: the Hessian would be rank deficient", m, dim_));

  auto data = std::make_shared<ShardData>();
  data->size = m;
  data->log_p = cache.log_components;
  data->log_q = sample.log_q;
  data->log_diff.resize(dim_, m);
  data->sign.resize(dim_, m);
  for (Index l = 0; l < m; ++l) {
    const double lp0 = data->log_p(0, l);
    for (Index j = 0; j < dim_; ++j) {
      const double lpj = data->log_p(j + 1, l);
      if (lpj == lp0) {
        data->sign(j, l) = 0.0;
        data->log_diff(j, l) = -std::numeric_limits<double>::infinity();
      } else {
        const double hi = std::max(lpj, lp0);
        const double lo = std::min(lpj, lp0);
        data->sign(j, l) = lpj > lp0 ? 1.0 : -1.0;
        data->log_diff(j, l) = hi + log1mexp(hi - lo);
      }
    }
  }
  shards_.push_back({std::move(data), 1.0});
  check_spd();
}

void McMixtureGenerator::check_spd() const {
  const Vector bary = interior_point();
  if (!is_spd(hessian_impl(bary)))
    throw Error(ErrorCode::NotSpd,
                fmt::format("MC mixture generator over '{}' (m = {}) is not strictly convex "
                            "at the barycentre; the components coincide on the sample",
                            fingerprint_, sample_size_));
}

bool McMixtureGenerator::in_domain(const Vector &eta) const {
  return eta.size() == dim_ && in_open_simplex(eta, kBoundaryMargin);
}

DomainInfo McMixtureGenerator::domain() const {
  DomainInfo info;
  info.shape = DomainShape::OpenSimplex;
  info.margin = kBoundaryMargin;
  return info;
}

Vector McMixtureGenerator::interior_point() const {
  return Vector::Constant(dim_, 1.0 / static_cast<double>(dim_ + 1));
}

std::string McMixtureGenerator::describe() const {
  return fmt::format("mc-mixture[{}; m={}]", fingerprint_, sample_size_);
}

double McMixtureGenerator::value_impl(const Vector &eta) const {
  const Vector log_w = log_weights(eta);
  double total = 0.0;
  for (const auto &shard : shards_) {
    const ShardData &d = *shard.data;
    const double sum = tree_reduce<double>(
        static_cast<std::size_t>(d.size), 0.0, [&](std::size_t i, double &acc) {
          const auto l = static_cast<Index>(i);
          const double lm = log_mixture(d.log_p, l, log_w);
          acc += std::exp(lm - d.log_q[l]) * lm;
        });
    total += shard.weight * (sum / static_cast<double>(d.size));
  }
  return total;
}

Vector McMixtureGenerator::gradient_impl(const Vector &eta) const {
  const Vector log_w = log_weights(eta);
  Vector total = Vector::Zero(dim_);
  for (const auto &shard : shards_) {
    const ShardData &d = *shard.data;
    const Vector sum = tree_reduce<Vector>(
        static_cast<std::size_t>(d.size), Vector::Zero(dim_), [&](std::size_t i, Vector &acc) {
          const auto l = static_cast<Index>(i);
          const double factor = 1.0 + log_mixture(d.log_p, l, log_w);
          for (Index j = 0; j < dim_; ++j)
            acc[j] += d.sign(j, l) * std::exp(d.log_diff(j, l) - d.log_q[l]) * factor;
        });
    total += shard.weight * (sum / static_cast<double>(d.size));
  }
  return total;
}

Matrix McMixtureGenerator::hessian_impl(const Vector &eta) const {
  const Vector log_w = log_weights(eta);
  Matrix total = Matrix::Zero(dim_, dim_);
  for (const auto &shard : shards_) {
    const ShardData &d = *shard.data;
    const Matrix sum = tree_reduce<Matrix>(
        static_cast<std::size_t>(d.size), Matrix::Zero(dim_, dim_),
        [&](std::size_t i, Matrix &acc) {
          const auto l = static_cast<Index>(i);
          const double half = 0.5 * (d.log_q[l] + log_mixture(d.log_p, l, log_w));
          Vector vl(dim_);
          for (Index j = 0; j < dim_; ++j)
            vl[j] = d.sign(j, l) * std::exp(d.log_diff(j, l) - half);
          acc.noalias() += vl * vl.transpose();
        });
    total += shard.weight * (sum / static_cast<double>(d.size));
  }
  return total;
}

std::shared_ptr<const McMixtureGenerator> McMixtureGenerator::aggregate(
    const std::vector<std::pair<std::shared_ptr<const McMixtureGenerator>, double>> &parts) {
  if (parts.empty())
    throw Error(ErrorCode::Precondition, "aggregation needs at least one part");
  double weight_sum = 0.0;
  const auto &head = parts.front().first;
  if (!head)
    throw Error(ErrorCode::Precondition, "aggregation part is null");
  std::shared_ptr<McMixtureGenerator> out(new McMixtureGenerator());
  out->dim_ = head->dim_;
  out->fingerprint_ = head->fingerprint_;
  for (const auto &[part, w] : parts) {
    if (!part)
      throw Error(ErrorCode::Precondition, "aggregation part is null");
    if (part->fingerprint_ != head->fingerprint_)
      throw Error(ErrorCode::Precondition,
                  fmt::format("cannot aggregate generators over '{}' and '{}'",
                              head->fingerprint_, part->fingerprint_));
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::Precondition,
                  fmt::format("aggregation weights must be positive, got {}", w));
    weight_sum += w;
    out->sample_size_ += part->sample_size_;
    for (const auto &shard : part->shards_)
      out->shards_.push_back({shard.data, shard.weight * w});
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw Error(ErrorCode::Precondition,
                fmt::format("aggregation weights sum to {}, not 1", weight_sum));
  return out;
}

std::shared_ptr<const McMixtureGenerator>
build_mc_mixture_generator(const MixtureFamily &family, const SampleSet &sample) {
  return std::make_shared<const McMixtureGenerator>(family, sample);
}

std::shared_ptr<const McMixtureGenerator> aggregate_mixture_generators(
    const std::vector<std::pair<std::shared_ptr<const McMixtureGenerator>, double>> &parts) {
  return McMixtureGenerator::aggregate(parts);
}

} // namespace mcig
