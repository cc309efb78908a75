#include "view/explore_task.hpp"

#include <cmath>

namespace view {

namespace {

Trajectory assemble(const Trajectory& prefix, const std::vector<Waypoint>& task,
                    const std::vector<Vec3>& positions) {
  Trajectory full = prefix;
  for (std::size_t i = 0; i < task.size(); ++i) {
    Waypoint w = task[i];
    w.pos = positions[i];
    full.waypoints.push_back(w);
  }
  full.kind = TrajKind::solved;
  return full;
}

bool all_within(const RewardSeries& rewards, double tol) {
  for (double r : rewards.values) {
    if (std::abs(r) > tol) return false;
  }
  return true;
}

bool stop_reached(TaskStopMode mode, bool success, bool pixel_ok) {
  switch (mode) {
    case TaskStopMode::pixel: return pixel_ok;
    case TaskStopMode::oracle: return success;
    case TaskStopMode::both: return success && pixel_ok;
  }
  return false;
}

}  // namespace

TaskSearchResult task_search(const Trajectory& grasp_prefix,
                             const std::vector<Waypoint>& task_prior,
                             const TaskEvalFn& evaluate,
                             const TaskSearchOptions& options) {
  const int nt = static_cast<int>(task_prior.size());
  TaskSearchResult result;
  result.best_rewards.total = -std::numeric_limits<double>::max();

  auto wp_box = [&](int i) {
    Box b{task_prior[i].pos - Vec3::Constant(options.eps_task),
          task_prior[i].pos + Vec3::Constant(options.eps_task)};
    if (options.clip) b = b.intersect(*options.clip);
    return b;
  };

  std::vector<std::unique_ptr<GpOptimizer>> opts;
  std::unique_ptr<GpOptimizer> joint;
  if (options.unified) {
    Bounds b;
    b.lo.resize(3 * nt);
    b.hi.resize(3 * nt);
    for (int i = 0; i < nt; ++i) {
      const Box box = wp_box(i);
      for (int k = 0; k < 3; ++k) {
        b.lo[3 * i + k] = box.lo[k];
        b.hi[3 * i + k] = box.hi[k];
      }
    }
    joint = std::make_unique<GpOptimizer>(b, options.seed, options.gp);
  } else {
    // the candidate pool is split across the per-waypoint proposers so
    // proposal compute per rollout stays constant; denser priors search
    // each waypoint more coarsely
    GpConfig per_wp = options.gp;
    per_wp.ei_candidates = std::max(64, options.gp.ei_candidates / nt);
    for (int i = 0; i < nt; ++i) {
      opts.push_back(std::make_unique<GpOptimizer>(
          Bounds::from_box(wp_box(i)),
          options.seed + 0x9e3779b97f4a7c15ull * (i + 1), per_wp));
    }
  }

  // per-waypoint incumbents; the rewards are independent, so the best
  // observation per waypoint assembles into the best known trajectory
  std::vector<Vec3> best_wp(nt);
  std::vector<double> best_val(nt, -std::numeric_limits<double>::max());
  bool bests_dirty = false;

  for (int iter = 0; iter < options.budget; ++iter) {
    std::vector<Vec3> proposals(nt);
    Point joint_point;
    bool verification = false;
    if (!options.unified && bests_dirty && iter > 0) {
      bool all_good = true;
      for (int i = 0; i < nt; ++i) {
        if (std::abs(best_val[i]) > options.pixel_tol) {
          all_good = false;
          break;
        }
      }
      if (all_good) {
        proposals = best_wp;
        verification = true;
        bests_dirty = false;
      }
    }
    if (verification) {
      // proposals already set
    } else if (iter == 0) {
      // the prior is the first candidate; with an exact extraction this
      // converges in a single rollout
      for (int i = 0; i < nt; ++i) proposals[i] = task_prior[i].pos;
      if (options.unified) {
        joint_point.resize(3 * nt);
        for (int i = 0; i < nt; ++i) joint_point.segment<3>(3 * i) = proposals[i];
      }
    } else if (options.unified) {
      joint_point = joint->ask();
      for (int i = 0; i < nt; ++i) proposals[i] = joint_point.segment<3>(3 * i);
    } else {
      for (int i = 0; i < nt; ++i) proposals[i] = opts[i]->ask();
    }

    const Trajectory full = assemble(grasp_prefix, task_prior, proposals);
    TaskEval eval = evaluate(full);
    ++result.rollouts_used;

    if (options.unified) {
      joint->tell(joint_point, eval.rewards.total);
    } else {
      for (int i = 0; i < nt; ++i) {
        if (!verification) opts[i]->tell(proposals[i], eval.rewards.values[i]);
        if (eval.rewards.values[i] > best_val[i]) {
          best_val[i] = eval.rewards.values[i];
          best_wp[i] = proposals[i];
          bests_dirty = true;
        }
      }
    }

    const bool pixel_ok = all_within(eval.rewards, options.pixel_tol);
    if (options.logger) {
      TaskIterationRecord rec;
      rec.iteration = iter;
      rec.proposals = proposals;
      rec.rewards = eval.rewards.values;
      rec.success = eval.episode.success;
      rec.pixel_ok = pixel_ok;
      options.logger(rec);
    }
    if (eval.rewards.total > result.best_rewards.total) {
      result.best = full;
      result.best_rewards = eval.rewards;
      result.success = eval.episode.success;
      result.pixel_ok = pixel_ok;
    }
    if (stop_reached(options.stop, eval.episode.success, pixel_ok)) {
      result.best = full;
      result.best_rewards = eval.rewards;
      result.success = eval.episode.success;
      result.pixel_ok = pixel_ok;
      result.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace view
