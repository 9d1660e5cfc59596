#include "mcig/mc_exponential_generator.hpp"

#include "mcig/error.hpp"
#include "mcig/lse.hpp"
#include "mcig/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace mcig {

McExponentialGenerator::McExponentialGenerator(const ExponentialFamily &family,
                                               const SampleSet &sample,
                                               std::optional<Index> reference)
    : family_label_(family.label()) {
  const auto &cache = sample.exponential_cache();
  if (cache.family_label != family_label_)
    throw Error(ErrorCode::Precondition,
                fmt::format("sample cache was built for family '{}', not '{}'",
                            cache.family_label, family_label_));
  const Index m = sample.size();
  const Index d = family.order();
  if (m < d + 1)
    throw Error(ErrorCode::Degenerate,
                fmt::format("m = {} variates give a Hessian of rank at most {} < D = {}", m,
                            m - 1, d));
  const Matrix &t = cache.statistics;

  if (reference) {
    if (*reference < 0 || *reference >= m)
      throw Error(ErrorCode::Precondition,
                  fmt::format("reference index {} outside [0, {})", *reference, m));
    reference_ = *reference;
  } else {
    reference_ = 0;
    double best = t.col(0).sum();
    for (Index i = 1; i < m; ++i) {
      const double s = t.col(i).sum();
      if (s < best) {
        best = s;
        reference_ = i;
      }
    }
  }

  t_ref_ = t.col(reference_);
  const double lq_r = sample.log_q[reference_];
  const double k_r = cache.carrier[reference_];
  offset_ = k_r - lq_r - std::log(static_cast<double>(m));

  a_.resize(d, m - 1);
  b_.resize(m - 1);
  Index col = 0;
  bool all_equal = true;
  for (Index i = 0; i < m; ++i) {
    if (i == reference_)
      continue;
    a_.col(col) = t.col(i) - t_ref_;
    b_[col] = cache.carrier[i] - k_r - sample.log_q[i] + lq_r;
    if (!a_.col(col).isZero(0.0))
      all_equal = false;
    ++col;
  }
  if (all_equal)
    throw Error(ErrorCode::Degenerate,
                "all sampled sufficient statistics coincide; the generator is affine");
  if (!is_spd(hessian_impl(Vector::Zero(d))))
    throw Error(ErrorCode::NotSpd,
                fmt::format("MC exponential generator over '{}' (m = {}) is not strictly "
                            "convex at theta = 0",
                            family_label_, m));
}

bool McExponentialGenerator::in_domain(const Vector &theta) const {
  return theta.size() == dim() && theta.allFinite();
}

std::string McExponentialGenerator::describe() const {
  return fmt::format("mc-exponential[{}; m={}, r={}]", family_label_, sample_size(),
                     reference_);
}

McExponentialGenerator::Softmax McExponentialGenerator::softmax(const Vector &theta) const {
  const Vector z = a_.transpose() * theta + b_;
  if (!z.allFinite())
    throw Error(ErrorCode::NonFinite, "lse0+ argument is not finite");
  const double shift = std::max(0.0, z.size() ? z.maxCoeff() : 0.0);
  Vector e = (z.array() - shift).exp().matrix();
  const double sum = tree_reduce<double>(static_cast<std::size_t>(e.size()), 0.0,
                                         [&](std::size_t i, double &acc) {
                                           acc += e[static_cast<Index>(i)];
                                         });
  const double total = std::exp(-shift) + sum;
  return {e / total, shift, total};
}

double McExponentialGenerator::value_impl(const Vector &theta) const {
  const Softmax s = softmax(theta);
  return s.shift + std::log(s.total);
}

Vector McExponentialGenerator::gradient_impl(const Vector &theta) const {
  const Softmax s = softmax(theta);
  return tree_reduce<Vector>(static_cast<std::size_t>(s.weights.size()),
                             Vector::Zero(dim()), [&](std::size_t i, Vector &acc) {
                               const auto l = static_cast<Index>(i);
                               acc.noalias() += s.weights[l] * a_.col(l);
                             });
}

Matrix McExponentialGenerator::hessian_impl(const Vector &theta) const {
  const Softmax s = softmax(theta);
  const Index d = dim();
  const Vector g = tree_reduce<Vector>(static_cast<std::size_t>(s.weights.size()),
                                       Vector::Zero(d), [&](std::size_t i, Vector &acc) {
                                         const auto l = static_cast<Index>(i);
                                         acc.noalias() += s.weights[l] * a_.col(l);
                                       });
  // Centered form sum_l s_l (a_l - g)(a_l - g)^T + s_0 g g^T: a sum of
  // positive semidefinite terms, free of the cancellation in
  // sum s_l a_l a_l^T - g g^T.
  Matrix h = tree_reduce<Matrix>(static_cast<std::size_t>(s.weights.size()),
                                 Matrix::Zero(d, d), [&](std::size_t i, Matrix &acc) {
                                   const auto l = static_cast<Index>(i);
                                   const Vector c = a_.col(l) - g;
                                   acc.noalias() += s.weights[l] * (c * c.transpose());
                                 });
  const double s0 = std::exp(-s.shift) / s.total;
  h.noalias() += s0 * (g * g.transpose());
  return h;
}

double McExponentialGenerator::dagger_value(const Vector &theta) const {
  return value(theta) + t_ref_.dot(theta) + offset_;
}

Vector McExponentialGenerator::dagger_gradient(const Vector &theta) const {
  return gradient(theta) + t_ref_;
}

std::shared_ptr<const McExponentialGenerator>
build_mc_exponential_generator(const ExponentialFamily &family, const SampleSet &sample,
                               std::optional<Index> reference) {
  return std::make_shared<const McExponentialGenerator>(family, sample, reference);
}

ExponentialMeanGenerator::ExponentialMeanGenerator(
    std::vector<std::pair<GeneratorPtr, double>> parts) {
  if (parts.empty())
    throw Error(ErrorCode::Precondition, "aggregation needs at least one part");
  double weight_sum = 0.0;
  for (auto &[g, w] : parts) {
    auto mc = std::dynamic_pointer_cast<const McExponentialGenerator>(g);
    if (!mc)
      throw Error(ErrorCode::Precondition,
                  fmt::format("'{}' carries no affine reconstruction data",
                              g ? g->describe() : std::string("null")));
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::Precondition,
                  fmt::format("aggregation weights must be positive, got {}", w));
    if (!parts_.empty() && (mc->family_label() != parts_.front().first->family_label() ||
                            mc->dim() != parts_.front().first->dim()))
      throw Error(ErrorCode::Precondition, "aggregated parts belong to different families");
    weight_sum += w;
    parts_.emplace_back(std::move(mc), w);
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw Error(ErrorCode::Precondition,
                fmt::format("aggregation weights sum to {}, not 1", weight_sum));
}

std::string ExponentialMeanGenerator::describe() const {
  return fmt::format("exp-mean[{} x {}]", parts_.size(), parts_.front().first->describe());
}

namespace {

// Normalized weights pi_i proportional to w_i exp(F_dagger_i), and the log
// normalizer.
std::pair<Vector, double> part_weights(const std::vector<double> &logits) {
  const double lse = log_sum_exp(logits);
  Vector pi(static_cast<Index>(logits.size()));
  for (std::size_t i = 0; i < logits.size(); ++i)
    pi[static_cast<Index>(i)] = std::exp(logits[i] - lse);
  return {pi, lse};
}

} // namespace

double ExponentialMeanGenerator::value_impl(const Vector &theta) const {
  std::vector<double> logits;
  logits.reserve(parts_.size());
  for (const auto &[g, w] : parts_)
    logits.push_back(std::log(w) + g->dagger_value(theta));
  return log_sum_exp(logits);
}

Vector ExponentialMeanGenerator::gradient_impl(const Vector &theta) const {
  std::vector<double> logits;
  for (const auto &[g, w] : parts_)
    logits.push_back(std::log(w) + g->dagger_value(theta));
  const auto [pi, lse] = part_weights(logits);
  Vector grad = Vector::Zero(dim());
  for (std::size_t i = 0; i < parts_.size(); ++i)
    grad += pi[static_cast<Index>(i)] * parts_[i].first->dagger_gradient(theta);
  return grad;
}

Matrix ExponentialMeanGenerator::hessian_impl(const Vector &theta) const {
  std::vector<double> logits;
  std::vector<Vector> grads;
  for (const auto &[g, w] : parts_) {
    logits.push_back(std::log(w) + g->dagger_value(theta));
    grads.push_back(g->dagger_gradient(theta));
  }
  const auto [pi, lse] = part_weights(logits);
  Vector mean = Vector::Zero(dim());
  for (std::size_t i = 0; i < grads.size(); ++i)
    mean += pi[static_cast<Index>(i)] * grads[i];
  Matrix h = Matrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const Vector c = grads[i] - mean;
    h += pi[static_cast<Index>(i)] *
         (parts_[i].first->dagger_hessian(theta) + c * c.transpose());
  }
  return h;
}

std::shared_ptr<const ExponentialMeanGenerator>
aggregate_exponential_generators(std::vector<std::pair<GeneratorPtr, double>> parts) {
  return std::make_shared<const ExponentialMeanGenerator>(std::move(parts));
}

} // namespace mcig
