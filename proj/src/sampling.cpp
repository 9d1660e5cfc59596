#include "mcig/sampling.hpp"

#include "mcig/error.hpp"
#include "mcig/lse.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>

namespace mcig {
namespace {

void require_size(Index m) {
  if (m < 1)
    throw Error(ErrorCode::Precondition,
                fmt::format("sample size must be >= 1, got {}", m));
}

SampleSet draw_variates(const Proposal &proposal, Index m, Seed seed, Index first_index) {
  require_size(m);
  if (first_index < 0)
    throw Error(ErrorCode::Precondition, "first stream index must be non-negative");
  SampleSet s;
  s.seed = seed;
  s.first_index = first_index;
  s.proposal_label = proposal.label();
  s.variates.resize(static_cast<std::size_t>(m));
  s.log_q.resize(m);
  for (Index i = 0; i < m; ++i) {
    VariateStream stream(seed, static_cast<std::uint64_t>(first_index + i));
    const double x = proposal.sample(stream);
    const double lq = proposal.log_density(x);
    if (!std::isfinite(x) || !std::isfinite(lq))
      throw Error(ErrorCode::NonFinite,
                  fmt::format("variate {} (x={}) has non-finite log q", first_index + i, x));
    s.variates[static_cast<std::size_t>(i)] = x;
    s.log_q[i] = lq;
  }
  return s;
}

} // namespace

Proposal::Proposal(std::string label, ComponentDensity::LogDensityFn log_density,
                   ComponentDensity::SamplerFn sampler)
    : label_(std::move(label)), log_density_(std::move(log_density)),
      sampler_(std::move(sampler)) {
  if (!log_density_ || !sampler_)
    throw Error(ErrorCode::Precondition, "proposal needs a log-density and a sampler");
}

Proposal Proposal::from_density(const ComponentDensity &density) {
  return Proposal(
      density.label(), [density](double x) { return density.log_density(x); },
      [density](VariateStream &s) { return density.sample(s); });
}

Proposal Proposal::uniform(double lower, double upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
    throw Error(ErrorCode::Precondition, "uniform proposal needs finite lower < upper");
  const double log_width = std::log(upper - lower);
  return Proposal(
      fmt::format("uniform({},{})", lower, upper),
      [=](double x) {
        return (x >= lower && x <= upper) ? -log_width
                                          : -std::numeric_limits<double>::infinity();
      },
      [=](VariateStream &s) { return lower + (upper - lower) * s.uniform(); });
}

Proposal uniform_mixture_proposal(const MixtureFamily &family) {
  const auto components = family.components();
  const auto k = components.size();
  const double log_k = std::log(static_cast<double>(k));
  return Proposal(
      fmt::format("uniform-mixture[{}]", family.fingerprint()),
      [components, log_k](double x) {
        std::vector<double> lp;
        lp.reserve(components.size());
        for (const auto &c : components)
          lp.push_back(c.log_density(x));
        return log_sum_exp(lp) - log_k;
      },
      [components, k](VariateStream &s) {
        auto j = static_cast<std::size_t>(s.uniform() * static_cast<double>(k));
        if (j >= k)
          j = k - 1;
        return components[j].sample(s);
      });
}

Proposal mixture_proposal(const MixtureFamily &family, const Vector &eta) {
  return Proposal::from_density(mixture_density(family, eta));
}

const MixtureCache &SampleSet::mixture_cache() const {
  if (const auto *c = std::get_if<MixtureCache>(&cache))
    return *c;
  throw Error(ErrorCode::Precondition, "sample set carries an exponential-family cache");
}

const ExponentialCache &SampleSet::exponential_cache() const {
  if (const auto *c = std::get_if<ExponentialCache>(&cache))
    return *c;
  throw Error(ErrorCode::Precondition, "sample set carries a mixture-family cache");
}

bool operator==(const SampleSet &a, const SampleSet &b) {
  if (a.seed != b.seed || a.first_index != b.first_index ||
      a.proposal_label != b.proposal_label || a.variates != b.variates ||
      a.log_q.size() != b.log_q.size() || a.log_q != b.log_q ||
      a.cache.index() != b.cache.index())
    return false;
  if (a.is_mixture()) {
    const auto &ca = a.mixture_cache();
    const auto &cb = b.mixture_cache();
    return ca.family_fingerprint == cb.family_fingerprint &&
           ca.log_components.rows() == cb.log_components.rows() &&
           ca.log_components.cols() == cb.log_components.cols() &&
           ca.log_components == cb.log_components;
  }
  const auto &ca = a.exponential_cache();
  const auto &cb = b.exponential_cache();
  return ca.family_label == cb.family_label &&
         ca.statistics.rows() == cb.statistics.rows() &&
         ca.statistics.cols() == cb.statistics.cols() &&
         ca.statistics == cb.statistics && ca.carrier == cb.carrier;
}

SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                          const MixtureFamily &family, Index first_index) {
  SampleSet s = draw_variates(proposal, m, seed, first_index);
  MixtureCache cache;
  cache.family_fingerprint = family.fingerprint();
  const Index k = family.order() + 1;
  cache.log_components.resize(k, m);
  for (Index i = 0; i < m; ++i) {
    const double x = s.variates[static_cast<std::size_t>(i)];
    for (Index j = 0; j < k; ++j) {
      const double lp = family.component(j).log_density(x);
      if (!std::isfinite(lp))
        throw Error(ErrorCode::NonFinite,
                    fmt::format("variate {} (x={}): log p_{} is not finite",
                                first_index + i, x, j));
      cache.log_components(j, i) = lp;
    }
  }
  s.cache = std::move(cache);
  return s;
}

SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                          const ExponentialFamily &family, Index first_index) {
  SampleSet s = draw_variates(proposal, m, seed, first_index);
  ExponentialCache cache;
  cache.family_label = family.label();
  cache.statistics.resize(family.order(), m);
  cache.carrier.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double x = s.variates[static_cast<std::size_t>(i)];
    if (!family.support().contains(x))
      throw Error(ErrorCode::Domain,
                  fmt::format("variate {} (x={}) lies outside the family support",
                              first_index + i, x));
    const Vector t = family.statistic(x);
    const double k = family.carrier(x);
    if (!t.allFinite() || !std::isfinite(k))
      throw Error(ErrorCode::NonFinite,
                  fmt::format("variate {} (x={}): t(x) or k(x) is not finite",
                              first_index + i, x));
    cache.statistics.col(i) = t;
    cache.carrier[i] = k;
  }
  s.cache = std::move(cache);
  return s;
}

std::vector<SampleSet> split_sample_set(const SampleSet &sample, Index parts) {
  const Index m = sample.size();
  if (parts < 1 || parts > m)
    throw Error(ErrorCode::Precondition,
                fmt::format("cannot split {} variates into {} parts", m, parts));
  std::vector<SampleSet> out;
  out.reserve(static_cast<std::size_t>(parts));
  for (Index p = 0; p < parts; ++p) {
    const Index begin = m * p / parts;
    const Index end = m * (p + 1) / parts;
    const Index len = end - begin;
    SampleSet block;
    block.seed = sample.seed;
    block.first_index = sample.first_index + begin;
    block.proposal_label = sample.proposal_label;
    block.variates.assign(sample.variates.begin() + begin, sample.variates.begin() + end);
    block.log_q = sample.log_q.segment(begin, len);
    if (sample.is_mixture()) {
      const auto &c = sample.mixture_cache();
      block.cache = MixtureCache{c.family_fingerprint,
                                 c.log_components.middleCols(begin, len)};
    } else {
      const auto &c = sample.exponential_cache();
      block.cache = ExponentialCache{c.family_label, c.statistics.middleCols(begin, len),
                                     c.carrier.segment(begin, len)};
    }
    out.push_back(std::move(block));
  }
  return out;
}

SampleSet concatenate_sample_sets(const std::vector<SampleSet> &blocks) {
  if (blocks.empty())
    throw Error(ErrorCode::Precondition, "nothing to concatenate");
  const SampleSet &head = blocks.front();
  Index total = 0;
  Index expected_index = head.first_index;
  for (const auto &b : blocks) {
    if (b.seed != head.seed || b.proposal_label != head.proposal_label ||
        b.cache.index() != head.cache.index() || b.first_index != expected_index)
      throw Error(ErrorCode::Precondition,
                  "blocks are not contiguous pieces of one sample stream");
    expected_index += b.size();
    total += b.size();
  }
  SampleSet out;
  out.seed = head.seed;
  out.first_index = head.first_index;
  out.proposal_label = head.proposal_label;
  out.log_q.resize(total);
  Index at = 0;
  if (head.is_mixture()) {
    MixtureCache cache{head.mixture_cache().family_fingerprint,
                       Matrix(head.mixture_cache().log_components.rows(), total)};
    for (const auto &b : blocks) {
      out.variates.insert(out.variates.end(), b.variates.begin(), b.variates.end());
      out.log_q.segment(at, b.size()) = b.log_q;
      cache.log_components.middleCols(at, b.size()) = b.mixture_cache().log_components;
      at += b.size();
    }
    out.cache = std::move(cache);
  } else {
    const auto &hc = head.exponential_cache();
    ExponentialCache cache{hc.family_label, Matrix(hc.statistics.rows(), total),
                           Vector(total)};
    for (const auto &b : blocks) {
      out.variates.insert(out.variates.end(), b.variates.begin(), b.variates.end());
      out.log_q.segment(at, b.size()) = b.log_q;
      cache.statistics.middleCols(at, b.size()) = b.exponential_cache().statistics;
      cache.carrier.segment(at, b.size()) = b.exponential_cache().carrier;
      at += b.size();
    }
    out.cache = std::move(cache);
  }
  return out;
}

} // namespace mcig
