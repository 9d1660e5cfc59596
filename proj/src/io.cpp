#include "mcig/io.hpp"

#include "mcig/error.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <fstream>
#include <sstream>

namespace mcig {
namespace {

[[noreturn]] void bad(const std::string &what) {
  throw Error(ErrorCode::Precondition, what);
}

template <typename T>
T field(const Json &doc, const char *key, const char *context) {
  if (!doc.is_object() || !doc.contains(key))
    bad(fmt::format("{}: missing field '{}'", context, key));
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception &e) {
    bad(fmt::format("{}: field '{}' has the wrong type ({})", context, key, e.what()));
  }
}

void check_schema(const Json &doc, const char *context) {
  if (!doc.is_object())
    bad(fmt::format("{}: expected a JSON object", context));
  if (doc.contains("schema") && doc.at("schema") != kSchemaVersion)
    bad(fmt::format("{}: unsupported schema {}", context, doc.at("schema").dump()));
}

Json component_to_json(const ComponentSpec &spec) {
  return Json{{"kind", spec.kind}, {"location", spec.location}, {"scale", spec.scale}};
}

ComponentSpec component_from_json(const Json &doc) {
  ComponentSpec spec;
  spec.kind = field<std::string>(doc, "kind", "component");
  spec.location = field<double>(doc, "location", "component");
  spec.scale = field<double>(doc, "scale", "component");
  return spec;
}

Vector vector_from_json(const Json &doc, const char *context) {
  if (!doc.is_array())
    bad(fmt::format("{}: expected an array of numbers", context));
  Vector v(static_cast<Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number())
      bad(fmt::format("{}: entry {} is not a number", context, i));
    v[static_cast<Index>(i)] = doc[i].get<double>();
  }
  return v;
}

Json vector_to_json(const Vector &v) { return Json(std::vector<double>(v.begin(), v.end())); }

Json matrix_rows_to_json(const Matrix &m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Matrix matrix_rows_from_json(const Json &doc, Index cols, const char *context) {
  if (!doc.is_array())
    bad(fmt::format("{}: expected an array of rows", context));
  Matrix m(static_cast<Index>(doc.size()), cols);
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const Vector row = vector_from_json(doc[r], context);
    if (row.size() != cols)
      bad(fmt::format("{}: row {} has {} entries, expected {}", context, r, row.size(), cols));
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

} // namespace

const MixtureFamily &FamilyConfig::mixture() const {
  if (const auto *f = std::get_if<MixtureFamily>(&family))
    return *f;
  bad("expected a mixture family");
}

const ExponentialFamily &FamilyConfig::exponential() const {
  if (const auto *f = std::get_if<ExponentialFamily>(&family))
    return *f;
  bad("expected an exponential family");
}

Index FamilyConfig::order() const {
  return is_mixture() ? mixture().order() : exponential().order();
}

std::string FamilyConfig::hash() const { return fnv1a_hex(canonical.dump()); }

FamilyConfig family_from_json(const Json &doc) {
  check_schema(doc, "family");
  const auto type = field<std::string>(doc, "type", "family");
  Json proposal = doc.contains("proposal") ? doc.at("proposal") : Json();
  if (type == "mixture") {
    const Json &list = doc.contains("components") ? doc.at("components") : Json();
    if (!list.is_array() || list.size() < 2)
      bad("mixture family: 'components' must list at least two components");
    std::vector<ComponentDensity> components;
    for (const auto &c : list)
      components.push_back(ComponentDensity::from_spec(component_from_json(c)));
    MixtureFamily family(std::move(components));
    Json canonical = family_to_json(family);
    if (!proposal.is_null())
      canonical["proposal"] = proposal;
    return FamilyConfig{std::move(family), proposal, canonical};
  }
  if (type == "exponential") {
    const auto stat = field<std::string>(doc, "sufficient_stat", "exponential family");
    if (stat != "polynomial")
      bad(fmt::format("exponential family: unknown sufficient_stat '{}'", stat));
    auto family = ExponentialFamily::polynomial(
        field<std::vector<int>>(doc, "powers", "exponential family"));
    Json canonical = family_to_json(family);
    if (!proposal.is_null())
      canonical["proposal"] = proposal;
    return FamilyConfig{std::move(family), proposal, canonical};
  }
  bad(fmt::format("family: unknown type '{}'", type));
}

FamilyConfig load_family(const std::string &path) { return family_from_json(read_json_file(path)); }

Json family_to_json(const MixtureFamily &family) {
  Json components = Json::array();
  for (const auto &c : family.components()) {
    if (!c.spec())
      bad(fmt::format("component '{}' is not a built-in and cannot be serialized", c.label()));
    components.push_back(component_to_json(*c.spec()));
  }
  return Json{{"schema", kSchemaVersion}, {"type", "mixture"}, {"components", components}};
}

Json family_to_json(const ExponentialFamily &family) {
  if (family.powers().empty())
    bad(fmt::format("exponential family '{}' is not polynomial and cannot be serialized",
                    family.label()));
  return Json{{"schema", kSchemaVersion},
              {"type", "exponential"},
              {"sufficient_stat", "polynomial"},
              {"powers", family.powers()}};
}

Proposal proposal_from_json(const Json &spec, const FamilyConfig &config) {
  const auto kind = field<std::string>(spec, "kind", "proposal");
  if (kind == "uniform_mixture") {
    if (!config.is_mixture())
      bad("proposal 'uniform_mixture' requires a mixture family");
    return uniform_mixture_proposal(config.mixture());
  }
  if (kind == "mixture") {
    if (!config.is_mixture())
      bad("proposal 'mixture' requires a mixture family");
    const Vector eta = vector_from_json(spec.value("eta", Json()), "proposal eta");
    if (eta.size() != config.order() || !in_open_simplex(eta))
      bad("proposal eta must be a point of the open simplex of the family's order");
    return mixture_proposal(config.mixture(), eta);
  }
  if (kind == "uniform")
    return Proposal::uniform(field<double>(spec, "lower", "uniform proposal"),
                             field<double>(spec, "upper", "uniform proposal"));
  if (kind == "gaussian" || kind == "laplace" || kind == "cauchy")
    return Proposal::from_density(ComponentDensity::from_spec(component_from_json(spec)));
  bad(fmt::format("proposal: unknown kind '{}'", kind));
}

Proposal proposal_from_config(const FamilyConfig &config) {
  if (!config.proposal.is_null())
    return proposal_from_json(config.proposal, config);
  if (config.is_mixture())
    return uniform_mixture_proposal(config.mixture());
  bad("exponential families need an explicit 'proposal'");
}

SampleSet draw_sample_set(const Proposal &proposal, Index m, Seed seed,
                          const FamilyConfig &config) {
  return config.is_mixture() ? draw_sample_set(proposal, m, seed, config.mixture())
                             : draw_sample_set(proposal, m, seed, config.exponential());
}

Json sample_set_to_json(const SampleSet &s) {
  Json doc{{"schema", kSchemaVersion},
           {"seed", s.seed},
           {"first_index", s.first_index},
           {"m", s.size()},
           {"proposal", s.proposal_label},
           {"variates", s.variates},
           {"log_q", vector_to_json(s.log_q)}};
  if (s.is_mixture()) {
    const auto &c = s.mixture_cache();
    doc["cache"] = Json{{"kind", "mixture"},
                        {"family", c.family_fingerprint},
                        {"log_components", matrix_rows_to_json(c.log_components)}};
  } else {
    const auto &c = s.exponential_cache();
    doc["cache"] = Json{{"kind", "exponential"},
                        {"family", c.family_label},
                        {"statistics", matrix_rows_to_json(c.statistics)},
                        {"carrier", vector_to_json(c.carrier)}};
  }
  return doc;
}

SampleSet sample_set_from_json(const Json &doc) {
  check_schema(doc, "sample set");
  SampleSet s;
  s.seed = field<std::uint64_t>(doc, "seed", "sample set");
  s.first_index = field<Index>(doc, "first_index", "sample set");
  s.proposal_label = field<std::string>(doc, "proposal", "sample set");
  s.variates = field<std::vector<double>>(doc, "variates", "sample set");
  s.log_q = vector_from_json(doc.at("log_q"), "sample set log_q");
  const Index m = static_cast<Index>(s.variates.size());
  if (m < 1 || s.log_q.size() != m || field<Index>(doc, "m", "sample set") != m)
    bad("sample set: inconsistent sizes");
  const Json &cache = doc.contains("cache") ? doc.at("cache") : Json();
  const auto kind = field<std::string>(cache, "kind", "sample cache");
  if (kind == "mixture") {
    s.cache = MixtureCache{field<std::string>(cache, "family", "sample cache"),
                           matrix_rows_from_json(cache.at("log_components"), m, "log_components")};
  } else if (kind == "exponential") {
    ExponentialCache c{field<std::string>(cache, "family", "sample cache"),
                       matrix_rows_from_json(cache.at("statistics"), m, "statistics"),
                       vector_from_json(cache.at("carrier"), "carrier")};
    if (c.carrier.size() != m)
      bad("sample set: carrier size mismatch");
    s.cache = std::move(c);
  } else {
    bad(fmt::format("sample cache: unknown kind '{}'", kind));
  }
  return s;
}

Json cluster_result_to_json(const ClusterResult &r) {
  Json centers = Json::array();
  for (const auto &c : r.centers) {
    Json entry = Json::object();
    if (c.left)
      entry["left"] = vector_to_json(*c.left);
    if (c.right)
      entry["right"] = vector_to_json(*c.right);
    centers.push_back(entry);
  }
  return Json{{"schema", kSchemaVersion},
              {"assignments", r.assignments},
              {"centers", centers},
              {"cost_history", r.cost_history},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

std::vector<Vector> points_from_json(const Json &doc) {
  const Json &list = doc.is_object() ? (doc.contains("points") ? doc.at("points") : Json())
                                     : doc;
  if (!list.is_array() || list.empty())
    bad("points: expected a non-empty array of parameter vectors");
  std::vector<Vector> points;
  for (const auto &p : list) {
    points.push_back(vector_from_json(p, "point"));
    if (points.back().size() != points.front().size())
      bad(fmt::format("points: point {} has {} coordinates, point 0 has {}", points.size() - 1,
                      points.back().size(), points.front().size()));
  }
  return points;
}

Json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    bad(fmt::format("cannot open '{}'", path));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    bad(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    bad(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out)
    bad(fmt::format("failed writing '{}'", path));
}

std::string fnv1a_hex(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

} // namespace mcig
