#pragma once

#include <functional>

#include "view/reward.hpp"
#include "view/sim.hpp"
#include "view/surrogate.hpp"

namespace view {

/// Axis-aligned search box spanned by extending the hand-object diagonal
/// by delta past both endpoints, then inflating thin axes.
struct GraspSearchRegion {
  Box box;
  Vec3 j_hat{Vec3::UnitX()};
  double delta{0.1};
};

struct VisitedEntry {
  Vec3 centroid;
  double reward_total{0.0};
  double sigma{0.0};
};

struct HighLevelArchive {
  std::vector<Vec3> unvisited;
  std::vector<VisitedEntry> visited;
  int k{3};
  double r0{0.0};
  Vec3 box_center{Vec3::Zero()};  // fallback target before any visit

  /// Recomputes every sigma against the current max deviation from r0.
  void refresh_sigmas();
  double sigma_max() const;
};

struct ExploitationPolicy {
  double gamma{5.0};    // softmax temperature over sigma
  double epsilon{0.04}; // half-width of the local search box (m)
  double alpha{0.3};    // explore coefficient, p_explore = alpha / sigma_max
};

GraspSearchRegion build_region(const Waypoint& hand_grasp, const Vec3& object_grasp,
                               double delta = 0.1, double delta_min = 0.05);

/// M centroids of a k-means clustering (k-means++ init, at most 100
/// iterations) over 100*M uniform samples in the box.
std::vector<Vec3> tessellate(const GraspSearchRegion& region, int m,
                             std::uint64_t rng_seed);

/// Most novel unvisited centroid: argmax of mean distance to the k
/// nearest visited entries plus an inverse-variance regularizer.
Vec3 next_high_level(const HighLevelArchive& archive);

double sigma_of(const HighLevelArchive& archive, double reward_total);

/// Softmax draw over visited entries, weighted by exp(gamma * sigma).
const VisitedEntry& sample_exploit(const HighLevelArchive& archive,
                                   const ExploitationPolicy& policy,
                                   std::mt19937_64& rng);

struct GraspEval {
  EpisodeResult episode;
  RewardSeries rewards;
};

using GraspEvalFn = std::function<GraspEval(const Vec3& candidate)>;

struct GraspRolloutRecord {
  int rollout{0};
  Vec3 candidate;
  double reward_total{0.0};
  double sigma_max{0.0};
  bool high_level{false};
  bool grasped{false};
};

struct GraspSearchOptions {
  ExploitationPolicy policy;
  int m{30};
  int k{3};
  int budget{60};
  std::uint64_t seed{0};
  std::function<void(const GraspRolloutRecord&)> logger;
};

struct GraspSearchResult {
  Vec3 grasp;
  bool grasped{false};
  int rollouts_used{0};
  double best_reward{0.0};
};

/// Two-level search for the grasp waypoint. The first rollout evaluates
/// the unmodified prior grasp to set R0; afterwards the loop alternates
/// between novel centroids and local refinement around high-sigma ones.
GraspSearchResult grasp_search(const GraspSearchRegion& region,
                               const Vec3& prior_grasp, const GraspEvalFn& evaluate,
                               const GraspSearchOptions& options);

}  // namespace view
