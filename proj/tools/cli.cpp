#include "cli.hpp"

#include "mcig/clustering.hpp"
#include "mcig/diagnostics.hpp"
#include "mcig/error.hpp"
#include "mcig/geometry.hpp"
#include "mcig/io.hpp"
#include "mcig/kl.hpp"
#include "mcig/mc_exponential_generator.hpp"
#include "mcig/mc_mixture_generator.hpp"
#include "mcig/oracles.hpp"
#include "mcig/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <optional>
#include <sstream>

namespace mcig::cli {
namespace {

/// Reads CLI11 configuration from JSON: top-level keys set options of the
/// main command, nested objects those of the subcommand of the same name.
/// Arrays are joined with commas, matching the list flags.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App *, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    Json doc;
    try {
      doc = Json::parse(input);
    } catch (const Json::parse_error &e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
      throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(doc, {}, items);
    return items;
  }

private:
  static std::string scalar(const Json &v) {
    if (v.is_string())
      return v.get<std::string>();
    return v.dump();
  }

  static void flatten(const Json &obj, const std::vector<std::string> &parents,
                      std::vector<CLI::ConfigItem> &items) {
    for (const auto &[key, value] : obj.items()) {
      if (key == "schema")
        continue;
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < value.size(); ++i)
          joined += (i ? "," : "") + scalar(value[i]);
        item.inputs = {joined};
      } else {
        item.inputs = {scalar(value)};
      }
      items.push_back(std::move(item));
    }
  }
};

int exit_code(ErrorCode code) {
  switch (code) {
  case ErrorCode::Precondition:
    return kExitConfig;
  case ErrorCode::Domain:
  case ErrorCode::Degenerate:
  case ErrorCode::NotSpd:
  case ErrorCode::NonFinite:
    return kExitDomain;
  case ErrorCode::NoSolution:
  case ErrorCode::Algorithm:
    return kExitAlgorithm;
  }
  return kExitAlgorithm;
}

[[noreturn]] void config_error(const std::string &what) {
  throw Error(ErrorCode::Precondition, what);
}

std::vector<double> parse_doubles(const std::string &text, const char *what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string token = text.substr(start, comma - start);
    token.erase(0, token.find_first_not_of(" \t[]"));
    token.erase(token.find_last_not_of(" \t[]") + 1);
    if (!token.empty()) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size())
        config_error(fmt::format("{}: '{}' is not a number", what, token));
      out.push_back(v);
    }
    start = comma + 1;
  }
  if (out.empty())
    config_error(fmt::format("{}: expected a comma-separated list of numbers", what));
  return out;
}

std::vector<long long> parse_integers(const std::string &text, const char *what) {
  std::vector<long long> out;
  for (double v : parse_doubles(text, what)) {
    if (v != std::floor(v))
      config_error(fmt::format("{}: {} is not an integer", what, v));
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

Vector to_vector(const std::vector<double> &v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

// Generator construction shared by divergence, cluster and check.

struct GeneratorOptions {
  std::string family;
  std::string sample;
  std::string oracle;
  std::string powers;
  long long m = 10000;
  long long reference = -1;
};

struct Session {
  Seed seed = 0;
  std::ostream *out = nullptr;
  std::ostream *err = nullptr;
};

void add_generator_options(CLI::App *cmd, GeneratorOptions &g) {
  cmd->add_option("--family", g.family, "Family JSON file (MC generator)");
  cmd->add_option("--sample", g.sample, "Pin the MC generator to a saved sample set");
  cmd->add_option("--m", g.m, "Sample size of the MC generator")->capture_default_str();
  cmd->add_option("--reference", g.reference,
                  "Reference variate of the exponential generator (default: argmin sum t)");
  cmd->add_option("--oracle", g.oracle, "Closed-form or quadrature generator instead")
      ->check(CLI::IsMember({"gaussian", "binomial", "pef", "negentropy"}));
  cmd->add_option("--powers", g.powers, "Powers of the pef oracle, e.g. 2,4,8");
}

void log_run(const Session &s, long long m, const std::string &proposal,
             const std::string &family_hash) {
  fmt::print(*s.err, "mcig: seed={} m={} proposal={} family={}\n", s.seed, m, proposal,
             family_hash);
}

GeneratorPtr build_generator(const GeneratorOptions &g, const Session &s) {
  if (!g.oracle.empty()) {
    if (g.oracle == "gaussian") {
      log_run(s, 0, "none", "gaussian-oracle");
      return gaussian_ef_oracle();
    }
    if (g.oracle == "binomial") {
      log_run(s, 0, "none", "binomial-oracle");
      return binomial_ef_oracle();
    }
    if (g.oracle == "pef") {
      if (g.powers.empty())
        config_error("--oracle pef needs --powers");
      std::vector<int> powers;
      for (long long p : parse_integers(g.powers, "--powers"))
        powers.push_back(static_cast<int>(p));
      log_run(s, 0, "none", fmt::format("pef-oracle:{}", g.powers));
      return pef_quadrature_oracle(std::move(powers));
    }
    if (g.family.empty())
      config_error("--oracle negentropy needs --family");
    const FamilyConfig cfg = load_family(g.family);
    log_run(s, 0, "none", cfg.hash());
    return mixture_negentropy_oracle(cfg.mixture());
  }

  if (g.family.empty())
    config_error("either --family or --oracle is required");
  const FamilyConfig cfg = load_family(g.family);
  SampleSet sample;
  if (!g.sample.empty()) {
    // Rebuild from (proposal, m, seed) instead of trusting stored caches.
    const SampleSet stored = sample_set_from_json(read_json_file(g.sample));
    if (stored.first_index != 0)
      config_error(fmt::format("{}: only whole sample sets can be pinned", g.sample));
    sample = draw_sample_set(proposal_from_config(cfg), stored.size(), stored.seed, cfg);
    if (!(sample == stored))
      config_error(fmt::format("{} was not drawn from this family and proposal", g.sample));
  } else {
    if (g.m < 1)
      config_error(fmt::format("--m must be >= 1, got {}", g.m));
    sample = draw_sample_set(proposal_from_config(cfg), static_cast<Index>(g.m), s.seed, cfg);
  }
  log_run(s, static_cast<long long>(sample.size()), sample.proposal_label, cfg.hash());
  if (cfg.is_mixture())
    return build_mc_mixture_generator(cfg.mixture(), sample);
  std::optional<Index> reference;
  if (g.reference >= 0)
    reference = static_cast<Index>(g.reference);
  return build_mc_exponential_generator(cfg.exponential(), sample, reference);
}


struct SampleOptions {
  std::string family;
  long long m = 10000;
  std::string out;
};

int cmd_sample(const SampleOptions &o, const Session &s) {
  if (o.family.empty())
    config_error("--family is required");
  if (o.m < 1)
    config_error(fmt::format("--m must be >= 1, got {}", o.m));
  const FamilyConfig cfg = load_family(o.family);
  const Proposal proposal = proposal_from_config(cfg);
  log_run(s, o.m, proposal.label(), cfg.hash());
  const SampleSet sample = draw_sample_set(proposal, static_cast<Index>(o.m), s.seed, cfg);
  const std::string text = sample_set_to_json(sample).dump() + "\n";
  const auto [lo, hi] = std::minmax_element(sample.variates.begin(), sample.variates.end());
  const std::string summary =
      fmt::format("m={} seed={} range=[{}, {}]\n", sample.size(), s.seed, format_double(*lo),
                  format_double(*hi));
  if (o.out.empty()) {
    *s.out << text;
    *s.err << summary;
  } else {
    write_text_file(o.out, text);
    *s.out << summary;
  }
  return kExitOk;
}

struct CurveOptions {
  std::string family;
  std::string m_list = "10,100,1000,10000";
  std::string seeds;
  double grid_min = 0.01;
  double grid_max = 0.99;
  long long grid_points = 99;
  bool oracle = false;
  std::string out;
};

int cmd_curve(const CurveOptions &o, const Session &s) {
  if (o.family.empty())
    config_error("--family is required");
  const FamilyConfig cfg = load_family(o.family);
  if (cfg.order() != 1)
    config_error(fmt::format("curve output needs a one-parameter family, got D = {}",
                             cfg.order()));
  if (o.grid_points < 2 || !(o.grid_min < o.grid_max))
    config_error("the grid needs --grid-min < --grid-max and at least 2 points");
  if (cfg.is_mixture() && !(o.grid_min > 0.0 && o.grid_max < 1.0))
    config_error(fmt::format("mixture grid [{}, {}] must lie inside (0, 1)", o.grid_min,
                             o.grid_max));
  const auto ms = parse_integers(o.m_list, "--m");
  const std::vector<long long> seeds =
      o.seeds.empty() ? std::vector<long long>{static_cast<long long>(s.seed)}
                      : parse_integers(o.seeds, "--seeds");
  const Proposal proposal = proposal_from_config(cfg);

  std::vector<double> grid(static_cast<std::size_t>(o.grid_points));
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = o.grid_min + (o.grid_max - o.grid_min) * static_cast<double>(i) /
                               static_cast<double>(grid.size() - 1);

  const char *symbol = cfg.is_mixture() ? "G" : "F";
  std::vector<std::string> header{cfg.is_mixture() ? "eta" : "theta"};
  std::vector<std::vector<double>> columns;
  for (long long m : ms) {
    if (m < 1)
      config_error(fmt::format("--m entries must be >= 1, got {}", m));
    for (long long seed : seeds) {
      Session run = s;
      run.seed = static_cast<Seed>(seed);
      log_run(run, m, proposal.label(), cfg.hash());
      const SampleSet sample =
          draw_sample_set(proposal, static_cast<Index>(m), run.seed, cfg);
      std::vector<double> col;
      if (cfg.is_mixture()) {
        const auto g = build_mc_mixture_generator(cfg.mixture(), sample);
        for (double x : grid)
          col.push_back(g->value(Vector::Constant(1, x)));
      } else {
        // The consistent estimator of F is the un-shifted F_dagger.
        const auto g = build_mc_exponential_generator(cfg.exponential(), sample);
        for (double x : grid)
          col.push_back(g->dagger_value(Vector::Constant(1, x)));
      }
      header.push_back(seeds.size() == 1 ? fmt::format("{}_m{}", symbol, m)
                                         : fmt::format("{}_m{}_seed{}", symbol, m, seed));
      columns.push_back(std::move(col));
    }
  }
  if (o.oracle) {
    GeneratorPtr oracle;
    if (cfg.is_mixture()) {
      oracle = mixture_negentropy_oracle(cfg.mixture());
    } else {
      if (cfg.exponential().powers().empty())
        config_error("no quadrature oracle for a non-polynomial family");
      oracle = pef_quadrature_oracle(cfg.exponential().powers());
    }
    std::vector<double> col;
    for (double x : grid)
      col.push_back(oracle->value(Vector::Constant(1, x)));
    header.push_back(fmt::format("{}_quadrature", symbol));
    columns.push_back(std::move(col));
  }

  std::string csv = fmt::format("{}\n", fmt::join(header, ","));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += format_double(grid[i]);
    for (const auto &col : columns)
      csv += "," + format_double(col[i]);
    csv += "\n";
  }
  if (o.out.empty())
    *s.out << csv;
  else
    write_text_file(o.out, csv);
  return kExitOk;
}

struct DivergenceOptions {
  GeneratorOptions gen;
  std::string p;
  std::string q;
  std::string measures = "bregman";
  double alpha = 1e-3;
  long long kl_m = 10000;
};

int cmd_divergence(const DivergenceOptions &o, const Session &s) {
  if (o.p.empty() || o.q.empty())
    config_error("--p and --q are required");
  const Vector p = to_vector(parse_doubles(o.p, "--p"));
  const Vector q = to_vector(parse_doubles(o.q, "--q"));
  std::vector<std::string> measures;
  {
    std::stringstream ss(o.measures);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty())
        measures.push_back(item);
  }
  const GeneratorPtr gen = build_generator(o.gen, s);
  const DuallyFlatSpace space(gen);
  gen->require_domain(p);
  gen->require_domain(q);

  Json report{{"generator", gen->describe()},
              {"p", std::vector<double>(p.begin(), p.end())},
              {"q", std::vector<double>(q.begin(), q.end())}};
  for (const auto &measure : measures) {
    if (measure == "bregman") {
      report["bregman"] = bregman_divergence(space, p, q);
    } else if (measure == "reverse-bregman") {
      report["reverse-bregman"] = bregman_divergence(space, q, p);
    } else if (measure == "jeffreys") {
      report["jeffreys"] = jeffreys_divergence(space, p, q);
    } else if (measure == "jeffreys-skew") {
      report["jeffreys-skew"] = jeffreys_skew(space, p, q, o.alpha);
    } else if (measure == "skew-jensen") {
      report["skew-jensen"] = skew_jensen(space, p, q, o.alpha);
    } else if (measure == "kl" || measure == "ekl") {
      if (o.gen.family.empty() || !load_family(o.gen.family).is_mixture())
        config_error("MC KL needs a mixture --family (points are mixture weights)");
      const FamilyConfig cfg = load_family(o.gen.family);
      report[measure] = mc_kl_estimate(mixture_density(cfg.mixture(), p),
                                       mixture_density(cfg.mixture(), q),
                                       static_cast<Index>(o.kl_m), s.seed,
                                       measure == "kl" ? KlVariant::Naive : KlVariant::Extended);
    } else {
      config_error(fmt::format("unknown measure '{}'", measure));
    }
  }
  *s.out << report.dump(2) << "\n";
  return kExitOk;
}

struct ClusterOptions {
  GeneratorOptions gen;
  std::string points;
  long long k = 2;
  std::string variant = "mixed";
  std::string seeding = "kmeans++";
  int max_iterations = 100;
  double tolerance = 1e-10;
  double alpha = 1e-3;
  double mixed_weight = 0.5;
  std::string out;
  std::string csv;
};

int cmd_cluster(const ClusterOptions &o, const Session &s) {
  if (o.points.empty())
    config_error("--points is required");
  const std::vector<Vector> points = points_from_json(read_json_file(o.points));
  ClusterConfig config;
  config.k = static_cast<Index>(o.k);
  config.variant = parse_cluster_variant(o.variant);
  config.seeding = parse_seeding(o.seeding);
  config.max_iterations = o.max_iterations;
  config.tolerance = o.tolerance;
  config.seed = s.seed;
  config.alpha = o.alpha;
  config.mixed_weight = o.mixed_weight;
  if (config.k < 1 || config.k > static_cast<Index>(points.size()))
    config_error(fmt::format("--k = {} must lie in [1, {}]", o.k, points.size()));

  const DuallyFlatSpace space(build_generator(o.gen, s));
  const ClusterResult result = bregman_kmeans(space, points, config);
  Json doc = cluster_result_to_json(result);
  doc["variant"] = to_string(config.variant);
  doc["seeding"] = to_string(config.seeding);
  doc["seed"] = s.seed;
  doc["generator"] = space.generator().describe();
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty())
    *s.out << text;
  else
    write_text_file(o.out, text);

  if (!o.csv.empty()) {
    std::string csv = "index";
    for (Index j = 0; j < space.dim(); ++j)
      csv += fmt::format(",x{}", j);
    csv += ",cluster\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      csv += std::to_string(i);
      for (Index j = 0; j < points[i].size(); ++j)
        csv += "," + format_double(points[i][j]);
      csv += fmt::format(",{}\n", result.assignments[i]);
    }
    write_text_file(o.csv, csv);
  }
  if (!result.converged) {
    fmt::print(*s.err, "mcig: clustering did not converge in {} iterations\n",
               result.iterations);
    return kExitAlgorithm;
  }
  return kExitOk;
}

struct CheckOptions {
  GeneratorOptions gen;
  long long points = 10;
  double tolerance = 1e-6;
};

int cmd_check(const CheckOptions &o, const Session &s) {
  if (o.points < 1)
    config_error("--points must be >= 1");
  const GeneratorPtr gen = build_generator(o.gen, s);
  const Generator &g = *gen;
  const bool simplex = g.domain().shape == DomainShape::OpenSimplex;

  Json rows = Json::array();
  bool ok = true;
  std::uint64_t draw = 0;
  for (long long i = 0; i < o.points; ++i) {
    Vector theta;
    for (int attempt = 0; attempt < 100; ++attempt) {
      VariateStream stream(s.seed, draw++);
      if (simplex) {
        theta = random_simplex_point(stream, g.dim(), 0.2);
      } else {
        theta = g.interior_point();
        for (Index j = 0; j < theta.size(); ++j)
          theta[j] += 0.1 * stream.standard_normal();
      }
      if (g.in_domain(theta))
        break;
    }
    const DerivativeReport r = check_derivatives(g, theta);
    const bool pass = r.scaled_min_eigenvalue > 0.0 && r.gradient_error <= o.tolerance &&
                      r.hessian_error <= o.tolerance;
    ok = ok && pass;
    rows.push_back(Json{{"point", std::vector<double>(theta.begin(), theta.end())},
                        {"gradient_error", r.gradient_error},
                        {"hessian_error", r.hessian_error},
                        {"symmetry_error", r.symmetry_error},
                        {"min_eigenvalue", r.min_eigenvalue},
                        {"scaled_min_eigenvalue", r.scaled_min_eigenvalue},
                        {"pass", pass}});
  }
  const Json report{{"generator", g.describe()}, {"checks", rows}, {"pass", ok}};
  *s.out << report.dump(2) << "\n";
  return ok ? kExitOk : kExitAlgorithm;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Monte Carlo information geometry: MC Bregman generators, divergences and "
               "Bregman clustering"};
  app.name("mcig");
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Session session{0, &out, &err};
  unsigned threads = 1;
  app.add_option("--seed", session.seed, "Global seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->capture_default_str();

  SampleOptions sample_opts;
  auto *sample = app.add_subcommand("sample", "Draw and save a seeded sample set");
  sample->add_option("--family", sample_opts.family, "Family JSON file");
  sample->add_option("--m", sample_opts.m, "Sample size")->capture_default_str();
  sample->add_option("--out", sample_opts.out, "Output file (default: stdout)");

  CurveOptions curve_opts;
  auto *curve = app.add_subcommand("curve", "CSV of the MC generator over a 1-D grid");
  curve->add_option("--family", curve_opts.family, "Family JSON file");
  curve->add_option("--m", curve_opts.m_list, "Comma-separated sample sizes")
      ->capture_default_str();
  curve->add_option("--seeds", curve_opts.seeds, "Comma-separated seeds (default: --seed)");
  curve->add_option("--grid-min", curve_opts.grid_min)->capture_default_str();
  curve->add_option("--grid-max", curve_opts.grid_max)->capture_default_str();
  curve->add_option("--grid-points", curve_opts.grid_points)->capture_default_str();
  curve->add_flag("--oracle", curve_opts.oracle, "Add the quadrature generator column");
  curve->add_option("--out", curve_opts.out, "Output CSV (default: stdout)");

  DivergenceOptions div_opts;
  auto *divergence = app.add_subcommand("divergence", "Divergences between two parameters");
  add_generator_options(divergence, div_opts.gen);
  divergence->add_option("--p", div_opts.p, "First parameter, comma-separated");
  divergence->add_option("--q", div_opts.q, "Second parameter, comma-separated");
  divergence->add_option("--measure", div_opts.measures,
                         "bregman, reverse-bregman, jeffreys, jeffreys-skew, skew-jensen, "
                         "kl, ekl (comma-separated)")
      ->capture_default_str();
  divergence->add_option("--alpha", div_opts.alpha, "Skew parameter")->capture_default_str();
  divergence->add_option("--kl-m", div_opts.kl_m, "MC KL sample size")->capture_default_str();

  ClusterOptions cluster_opts;
  auto *cluster = app.add_subcommand("cluster", "Bregman k-means over parameter points");
  add_generator_options(cluster, cluster_opts.gen);
  cluster->add_option("--points", cluster_opts.points, "Points JSON file");
  cluster->add_option("--k", cluster_opts.k)->capture_default_str();
  cluster->add_option("--variant", cluster_opts.variant)
      ->check(CLI::IsMember({"right", "left", "mixed", "jeffreys"}))
      ->capture_default_str();
  cluster->add_option("--seeding", cluster_opts.seeding)
      ->check(CLI::IsMember({"kmeans++", "forgy"}))
      ->capture_default_str();
  cluster->add_option("--max-iters", cluster_opts.max_iterations)->capture_default_str();
  cluster->add_option("--tolerance", cluster_opts.tolerance)->capture_default_str();
  cluster->add_option("--alpha", cluster_opts.alpha)->capture_default_str();
  cluster->add_option("--mixed-weight", cluster_opts.mixed_weight)->capture_default_str();
  cluster->add_option("--out", cluster_opts.out, "Result JSON (default: stdout)");
  cluster->add_option("--csv", cluster_opts.csv, "Per-point coordinates and labels");

  CheckOptions check_opts;
  auto *check = app.add_subcommand("check", "Convexity and derivative diagnostics");
  add_generator_options(check, check_opts.gen);
  check->add_option("--points", check_opts.points, "Random domain points")
      ->capture_default_str();
  check->add_option("--tolerance", check_opts.tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    set_thread_count(threads);
    if (sample->parsed())
      return cmd_sample(sample_opts, session);
    if (curve->parsed())
      return cmd_curve(curve_opts, session);
    if (divergence->parsed())
      return cmd_divergence(div_opts, session);
    if (cluster->parsed())
      return cmd_cluster(cluster_opts, session);
    if (check->parsed())
      return cmd_check(check_opts, session);
  } catch (const Error &e) {
    fmt::print(err, "mcig: error: {}\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception &e) {
    fmt::print(err, "mcig: error: {}\n", e.what());
    return kExitAlgorithm;
  }
  return kExitConfig;
}

} // namespace mcig::cli
