#pragma once

#include "mcig/clustering.hpp"
#include "mcig/families.hpp"
#include "mcig/sampling.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace mcig {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// A family loaded from JSON, with its (optional) proposal description.
///
///   {"schema": 1, "type": "mixture",
///    "components": [{"kind": "gaussian", "location": 0, "scale": 3}, ...],
///    "proposal": {...}}
///   {"schema": 1, "type": "exponential", "sufficient_stat": "polynomial",
///    "powers": [1, 2], "proposal": {...}}
///
/// Proposals: {"kind": "uniform_mixture"} (mixtures; the default),
/// {"kind": "mixture", "eta": [...]} (mixtures), {"kind": "uniform", "lower":
/// a, "upper": b}, or a built-in component {"kind": "gaussian" | "laplace" |
/// "cauchy", "location": ..., "scale": ...}.
struct FamilyConfig {
  std::variant<MixtureFamily, ExponentialFamily> family;
  Json proposal;  // null when absent
  Json canonical; // normalized document, used for hashing

  [[nodiscard]] bool is_mixture() const noexcept {
    return std::holds_alternative<MixtureFamily>(family);
  }
  [[nodiscard]] const MixtureFamily &mixture() const;
  [[nodiscard]] const ExponentialFamily &exponential() const;
  [[nodiscard]] Index order() const;
  /// FNV-1a 64 of the canonical document, as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

[[nodiscard]] FamilyConfig family_from_json(const Json &doc);
[[nodiscard]] FamilyConfig load_family(const std::string &path);
[[nodiscard]] Json family_to_json(const MixtureFamily &family);
[[nodiscard]] Json family_to_json(const ExponentialFamily &family);

/// The configured proposal; mixtures default to the uniform mixture.
/// Exponential families require an explicit proposal.
[[nodiscard]] Proposal proposal_from_config(const FamilyConfig &config);
[[nodiscard]] Proposal proposal_from_json(const Json &spec, const FamilyConfig &config);

[[nodiscard]] SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                                        const FamilyConfig &config);

[[nodiscard]] Json sample_set_to_json(const SampleSet &sample);
[[nodiscard]] SampleSet sample_set_from_json(const Json &doc);

[[nodiscard]] Json cluster_result_to_json(const ClusterResult &result);

/// {"points": [[...], ...]} or a bare array of arrays.
[[nodiscard]] std::vector<Vector> points_from_json(const Json &doc);

[[nodiscard]] Json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

[[nodiscard]] std::string fnv1a_hex(const std::string &bytes);
/// 17 significant digits: enough to round-trip any double.
[[nodiscard]] std::string format_double(double v);

} // namespace mcig
