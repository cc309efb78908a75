#pragma once

#include <functional>
#include <optional>

#include "view/reward.hpp"
#include "view/sim.hpp"
#include "view/surrogate.hpp"

namespace view {

struct TaskEval {
  EpisodeResult episode;
  RewardSeries rewards;  // one entry per task waypoint
};

using TaskEvalFn = std::function<TaskEval(const Trajectory& full)>;

/// How the search decides it is done. Pixel mode stops when every
/// per-waypoint reward is within tolerance; oracle mode stops on the
/// simulator's success flag; both requires the two to agree.
enum class TaskStopMode { pixel, oracle, both };

struct TaskIterationRecord {
  int iteration{0};
  std::vector<Vec3> proposals;
  std::vector<double> rewards;
  bool success{false};
  bool pixel_ok{false};
};

struct TaskSearchOptions {
  double eps_task{0.15};    // per-waypoint box half-width (m)
  double pixel_tol{10.0};   // |r_t| threshold in pixels
  int budget{40};
  std::uint64_t seed{0};
  TaskStopMode stop{TaskStopMode::both};
  bool unified{false};      // single joint optimizer baseline
  std::optional<Box> clip;  // proposals constrained to this box (workspace)
  GpConfig gp{};            // surrogate settings shared by all waypoints
  std::function<void(const TaskIterationRecord&)> logger;
};

struct TaskSearchResult {
  Trajectory best;          // grasp prefix + refined task waypoints
  RewardSeries best_rewards;
  bool success{false};
  bool pixel_ok{false};
  bool converged{false};    // stop condition met within budget
  int rollouts_used{0};
};

/// Refines the post-grasp waypoints. One optimizer per task waypoint
/// proposes all positions jointly each iteration; a single rollout of
/// the assembled trajectory rewards every optimizer with only its own
/// waypoint's term. The first iteration proposes the prior itself. The
/// unified flag swaps in one joint optimizer over all coordinates fed
/// the reward total, matching the whole-trajectory baseline.
TaskSearchResult task_search(const Trajectory& grasp_prefix,
                             const std::vector<Waypoint>& task_prior,
                             const TaskEvalFn& evaluate,
                             const TaskSearchOptions& options);

}  // namespace view
