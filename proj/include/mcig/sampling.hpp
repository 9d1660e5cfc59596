#pragma once

#include "mcig/families.hpp"
#include "mcig/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace mcig {

/// Importance-sampling proposal q: log-density, seeded sampler and label.
class Proposal {
public:
  Proposal(std::string label, ComponentDensity::LogDensityFn log_density,
           ComponentDensity::SamplerFn sampler);

  static Proposal from_density(const ComponentDensity &density);
  static Proposal uniform(double lower, double upper);

  [[nodiscard]] double log_density(double x) const { return log_density_(x); }
  [[nodiscard]] double sample(VariateStream &stream) const { return sampler_(stream); }
  [[nodiscard]] const std::string &label() const noexcept { return label_; }

private:
  std::string label_;
  ComponentDensity::LogDensityFn log_density_;
  ComponentDensity::SamplerFn sampler_;
};

/// Equal-weight mixture of all D+1 components, q = (1/(D+1)) sum_i p_i.
[[nodiscard]] Proposal uniform_mixture_proposal(const MixtureFamily &family);

/// q = m(.; eta), e.g. the midpoint mixture.
[[nodiscard]] Proposal mixture_proposal(const MixtureFamily &family, const Vector &eta);

/// log p_j(x_i) for every component j (rows) and variate i (columns).
struct MixtureCache {
  std::string family_fingerprint;
  Matrix log_components;  // (D+1) x m
};

/// t(x_i) (columns of a D x m matrix) and k(x_i).
struct ExponentialCache {
  std::string family_label;
  Matrix statistics;  // D x m
  Vector carrier;     // m
};

/// An immutable iid sample x_1..x_m from a proposal, with per-variate caches.
///
/// Variate i of a set drawn with (seed, first_index) is the variate with
/// stream index first_index + i, so contiguous blocks of one stream can be
/// drawn independently and concatenated bit-identically.
struct SampleSet {
  Seed seed = 0;
  Index first_index = 0;
  std::string proposal_label;
  std::vector<double> variates;
  Vector log_q;
  std::variant<MixtureCache, ExponentialCache> cache;

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(variates.size()); }
  [[nodiscard]] bool is_mixture() const noexcept {
    return std::holds_alternative<MixtureCache>(cache);
  }
  [[nodiscard]] const MixtureCache &mixture_cache() const;
  [[nodiscard]] const ExponentialCache &exponential_cache() const;

  friend bool operator==(const SampleSet &, const SampleSet &);
};

[[nodiscard]] SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                                        const MixtureFamily &family,
                                        Index first_index = 0);
[[nodiscard]] SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                                        const ExponentialFamily &family,
                                        Index first_index = 0);

/// Splits into `parts` contiguous blocks of near-equal size.
[[nodiscard]] std::vector<SampleSet> split_sample_set(const SampleSet &sample, Index parts);

/// Concatenates contiguous blocks of one stream back into a single set.
[[nodiscard]] SampleSet concatenate_sample_sets(const std::vector<SampleSet> &blocks);

} // namespace mcig
