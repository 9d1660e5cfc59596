#include "mcig/clustering.hpp"

#include "mcig/error.hpp"
#include "mcig/parallel.hpp"
#include "mcig/rng.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <limits>

namespace mcig {
namespace {

bool uses_left(ClusterVariant v) {
  return v == ClusterVariant::LeftSided || v == ClusterVariant::Mixed;
}
bool uses_right(ClusterVariant v) { return v != ClusterVariant::LeftSided; }

ClusterCenter center_at(const Vector &point, ClusterVariant v) {
  ClusterCenter c;
  if (uses_left(v))
    c.left = point;
  if (uses_right(v))
    c.right = point;
  return c;
}

void validate(const DuallyFlatSpace &space, const std::vector<Vector> &points,
              const ClusterConfig &config) {
  if (points.empty())
    throw Error(ErrorCode::Precondition, "clustering needs at least one point");
  if (config.k < 1 || config.k > static_cast<Index>(points.size()))
    throw Error(ErrorCode::Precondition,
                fmt::format("k = {} must lie in [1, {}]", config.k, points.size()));
  if (config.max_iterations < 1)
    throw Error(ErrorCode::Precondition, "max_iterations must be >= 1");
  if (!(config.tolerance >= 0.0))
    throw Error(ErrorCode::Precondition, "tolerance must be non-negative");
  if (!(config.mixed_weight > 0.0 && config.mixed_weight < 1.0))
    throw Error(ErrorCode::Precondition, "mixed weight must lie in (0, 1)");
  if (config.variant == ClusterVariant::SkewJeffreys &&
      !(config.alpha > 0.0 && config.alpha <= 0.5))
    throw Error(ErrorCode::Precondition, "skew-Jeffreys alpha must lie in (0, 1/2]");
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      space.generator().require_domain(points[i]);
    } catch (const Error &e) {
      throw Error(e.code(), fmt::format("point {}: {}", i, e.what()));
    }
  }
}

// Index of the first draw with cumulative weight above u * total.
std::size_t draw_weighted(const std::vector<double> &weights, double u) {
  double total = 0.0;
  for (double w : weights)
    total += w;
  const double target = u * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0)
      continue;
    last_positive = i;
    running += weights[i];
    if (running > target)
      return i;
  }
  return last_positive;
}

std::vector<ClusterCenter> seed_centers(const DuallyFlatSpace &space,
                                        const std::vector<Vector> &points,
                                        const ClusterConfig &config) {
  const std::size_t n = points.size();
  const auto k = static_cast<std::size_t>(config.k);
  std::vector<ClusterCenter> centers;
  std::uint64_t draw = 0;
  auto next_uniform = [&] { return VariateStream(config.seed, draw++).uniform(); };

  if (config.seeding == Seeding::Forgy) {
    // Partial Fisher-Yates: k distinct points uniformly at random.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
      order[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + std::min(n - i - 1, static_cast<std::size_t>(next_uniform() * (n - i)));
      std::swap(order[i], order[j]);
      centers.push_back(center_at(points[order[i]], config.variant));
    }
    return centers;
  }

  // k-means++ with the variant's own divergence as the sampling weight.
  const auto first = std::min(n - 1, static_cast<std::size_t>(next_uniform() * n));
  centers.push_back(center_at(points[first], config.variant));
  std::vector<double> nearest(n);
  parallel_for(n, [&](std::size_t i) {
    nearest[i] = cluster_divergence(space, config, points[i], centers.back());
  });
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : nearest)
      total += d;
    std::size_t pick;
    if (total > 0.0) {
      pick = draw_weighted(nearest, next_uniform());
    } else {
      // Every point coincides with a chosen seed; fall back to uniform.
      pick = std::min(n - 1, static_cast<std::size_t>(next_uniform() * n));
    }
    centers.push_back(center_at(points[pick], config.variant));
    parallel_for(n, [&](std::size_t i) {
      nearest[i] = std::min(nearest[i],
                            cluster_divergence(space, config, points[i], centers.back()));
    });
  }
  return centers;
}

struct Assignment {
  std::vector<Index> labels;
  std::vector<double> distances;
  double cost = 0.0;
};

Assignment assign(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                  const std::vector<ClusterCenter> &centers, const ClusterConfig &config) {
  const std::size_t n = points.size();
  Assignment a;
  a.labels.assign(n, 0);
  a.distances.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    Index best_c = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = cluster_divergence(space, config, points[i], centers[c]);
      if (d < best) {  // strict: lowest index wins ties
        best = d;
        best_c = static_cast<Index>(c);
      }
    }
    a.labels[i] = best_c;
    a.distances[i] = best;
  });
  return a;
}

double total_cost(const std::vector<double> &distances) {
  return tree_reduce<double>(distances.size(), 0.0,
                             [&](std::size_t i, double &acc) { acc += distances[i]; });
}

// Reseeds every empty cluster with the point farthest from its own center,
// taken from a cluster that keeps at least one other member.
void repair_empty(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                  std::vector<ClusterCenter> &centers, Assignment &a,
                  const ClusterConfig &config) {
  std::vector<Index> sizes(centers.size(), 0);
  for (Index l : a.labels)
    ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (sizes[c] > 0)
      continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[static_cast<std::size_t>(a.labels[i])] < 2)
        continue;
      if (a.distances[i] > far_d) {
        far_d = a.distances[i];
        far = i;
      }
    }
    if (far == points.size())
      throw Error(ErrorCode::Algorithm, fmt::format("cannot repair empty cluster {}", c));
    --sizes[static_cast<std::size_t>(a.labels[far])];
    ++sizes[c];
    a.labels[far] = static_cast<Index>(c);
    a.distances[far] = cluster_divergence(space, config, points[far],
                                          centers[c] = center_at(points[far], config.variant));
  }
  a.cost = total_cost(a.distances);
}

std::vector<ClusterCenter> update_centers(const DuallyFlatSpace &space,
                                          const std::vector<Vector> &points,
                                          const Assignment &a, const ClusterConfig &config) {
  const std::size_t k = static_cast<std::size_t>(config.k);
  const Index d = space.dim();
  std::vector<ClusterCenter> centers(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (a.labels[i] == static_cast<Index>(c))
        members.push_back(i);
    const double count = static_cast<double>(members.size());
    if (uses_right(config.variant)) {
      const Vector sum = tree_reduce<Vector>(
          members.size(), Vector::Zero(d),
          [&](std::size_t j, Vector &acc) { acc += points[members[j]]; });
      centers[c].right = sum / count;
    }
    if (uses_left(config.variant)) {
      const Vector sum = tree_reduce<Vector>(
          members.size(), Vector::Zero(d), [&](std::size_t j, Vector &acc) {
            acc += space.generator().gradient(points[members[j]]);
          });
      const Vector mean_gradient = sum / count;
      // Start from the primal mean, which lies in the (convex) domain.
      Vector start = Vector::Zero(d);
      for (std::size_t i : members)
        start += points[i];
      start /= count;
      try {
        centers[c].left = primal_coordinates(space, mean_gradient, start).point;
      } catch (const Error &e) {
        throw Error(ErrorCode::Algorithm,
                    fmt::format("left centroid of cluster {} (mean gradient ({})): {}", c,
                                fmt::join(mean_gradient.data(),
                                          mean_gradient.data() + mean_gradient.size(), ", "),
                                e.what()));
      }
    }
  }
  return centers;
}

} // namespace

const char *to_string(ClusterVariant variant) noexcept {
  switch (variant) {
  case ClusterVariant::RightSided:
    return "right";
  case ClusterVariant::LeftSided:
    return "left";
  case ClusterVariant::Mixed:
    return "mixed";
  case ClusterVariant::SkewJeffreys:
    return "jeffreys";
  }
  return "?";
}

const char *to_string(Seeding seeding) noexcept {
  return seeding == Seeding::Forgy ? "forgy" : "kmeans++";
}

ClusterVariant parse_cluster_variant(const std::string &name) {
  for (auto v : {ClusterVariant::RightSided, ClusterVariant::LeftSided, ClusterVariant::Mixed,
                 ClusterVariant::SkewJeffreys})
    if (name == to_string(v))
      return v;
  throw Error(ErrorCode::Precondition, fmt::format("unknown clustering variant '{}'", name));
}

Seeding parse_seeding(const std::string &name) {
  if (name == "kmeans++")
    return Seeding::KMeansPlusPlus;
  if (name == "forgy")
    return Seeding::Forgy;
  throw Error(ErrorCode::Precondition, fmt::format("unknown seeding '{}'", name));
}

double cluster_divergence(const DuallyFlatSpace &space, const ClusterConfig &config,
                          const Vector &point, const ClusterCenter &center) {
  switch (config.variant) {
  case ClusterVariant::RightSided:
    return bregman_divergence(space, point, *center.right);
  case ClusterVariant::LeftSided:
    return bregman_divergence(space, *center.left, point);
  case ClusterVariant::Mixed:
    return config.mixed_weight * bregman_divergence(space, *center.left, point) +
           (1.0 - config.mixed_weight) * bregman_divergence(space, point, *center.right);
  case ClusterVariant::SkewJeffreys:
    return jeffreys_skew(space, point, *center.right, config.alpha);
  }
  return 0.0;
}

ClusterResult bregman_kmeans(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                             const ClusterConfig &config) {
  validate(space, points, config);
  std::vector<ClusterCenter> centers = seed_centers(space, points, config);
  Assignment current = assign(space, points, centers, config);
  repair_empty(space, points, centers, current, config);

  ClusterResult result;
  result.cost_history.push_back(current.cost);
  for (int it = 1; it <= config.max_iterations; ++it) {
    std::vector<ClusterCenter> next_centers = update_centers(space, points, current, config);
    Assignment next = assign(space, points, next_centers, config);
    repair_empty(space, points, next_centers, next, config);
    result.iterations = it;
    if (next.cost > current.cost) {
      // Only possible when the center update is not the exact minimizer
      // (skew-Jeffreys); keep the better configuration.
      result.converged = true;
      break;
    }
    const bool unchanged = next.labels == current.labels;
    const double decrease = current.cost - next.cost;
    centers = std::move(next_centers);
    current = std::move(next);
    result.cost_history.push_back(current.cost);
    if (unchanged || decrease < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.assignments = current.labels;
  result.centers = std::move(centers);
  return result;
}

ClusterResult right_sided_kmeans(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                                 ClusterConfig config) {
  config.variant = ClusterVariant::RightSided;
  return bregman_kmeans(space, points, config);
}

ClusterResult left_sided_kmeans(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                                ClusterConfig config) {
  config.variant = ClusterVariant::LeftSided;
  return bregman_kmeans(space, points, config);
}

ClusterResult mixed_kmeans(const DuallyFlatSpace &space, const std::vector<Vector> &points,
                           ClusterConfig config) {
  config.variant = ClusterVariant::Mixed;
  return bregman_kmeans(space, points, config);
}

ClusterResult jeffreys_kmeans_via_skew(const DuallyFlatSpace &space,
                                       const std::vector<Vector> &points, ClusterConfig config,
                                       double alpha) {
  config.variant = ClusterVariant::SkewJeffreys;
  config.alpha = alpha;
  return bregman_kmeans(space, points, config);
}

} // namespace mcig
