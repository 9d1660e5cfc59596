#pragma once

#include "mcig/geometry.hpp"
#include "mcig/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcig {

enum class ClusterVariant {
  RightSided,    // argmin_c B(x : c), centroid = arithmetic mean
  LeftSided,     // argmin_c B(c : x), centroid = grad F*(mean of gradients)
  Mixed,         // w B(l_c : x) + (1 - w) B(x : r_c), both centroids
  SkewJeffreys,  // skew-Jensen surrogate of Jeffreys, arithmetic-mean centers
};

enum class Seeding { KMeansPlusPlus, Forgy };

struct ClusterConfig {
  Index k = 2;
  ClusterVariant variant = ClusterVariant::RightSided;
  Seeding seeding = Seeding::KMeansPlusPlus;
  int max_iterations = 100;
  double tolerance = 1e-10;  // stop once the cost decreases by less
  Seed seed = 0;
  double mixed_weight = 0.5;  // weight of the left divergence
  double alpha = 1e-3;        // skew-Jeffreys only, in (0, 1/2]
};

struct ClusterCenter {
  std::optional<Vector> left;   // left-sided and mixed
  std::optional<Vector> right;  // right-sided, mixed and skew-Jeffreys
};

struct ClusterResult {
  std::vector<Index> assignments;
  std::vector<ClusterCenter> centers;
  std::vector<double> cost_history;
  int iterations = 0;
  bool converged = false;
};

[[nodiscard]] const char *to_string(ClusterVariant variant) noexcept;
[[nodiscard]] const char *to_string(Seeding seeding) noexcept;
[[nodiscard]] ClusterVariant parse_cluster_variant(const std::string &name);
[[nodiscard]] Seeding parse_seeding(const std::string &name);

/// The divergence a variant minimizes between a point and a center.
[[nodiscard]] double cluster_divergence(const DuallyFlatSpace &space, const ClusterConfig &config,
                                        const Vector &point, const ClusterCenter &center);

/// Bregman Lloyd iterations. Ties go to the lowest cluster index; an empty
/// cluster is reseeded with the point farthest from its own center. Results
/// do not depend on the thread count.
[[nodiscard]] ClusterResult bregman_kmeans(const DuallyFlatSpace &space,
                                           const std::vector<Vector> &points,
                                           const ClusterConfig &config);

[[nodiscard]] ClusterResult right_sided_kmeans(const DuallyFlatSpace &space,
                                               const std::vector<Vector> &points,
                                               ClusterConfig config);
[[nodiscard]] ClusterResult left_sided_kmeans(const DuallyFlatSpace &space,
                                              const std::vector<Vector> &points,
                                              ClusterConfig config);
[[nodiscard]] ClusterResult mixed_kmeans(const DuallyFlatSpace &space,
                                         const std::vector<Vector> &points, ClusterConfig config);
[[nodiscard]] ClusterResult jeffreys_kmeans_via_skew(const DuallyFlatSpace &space,
                                                     const std::vector<Vector> &points,
                                                     ClusterConfig config, double alpha = 1e-3);

} // namespace mcig
