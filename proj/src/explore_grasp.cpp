#include "view/explore_grasp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace view {

void HighLevelArchive::refresh_sigmas() {
  double max_dev = 0.0;
  for (const auto& e : visited) max_dev = std::max(max_dev, std::abs(e.reward_total - r0));
  for (auto& e : visited) {
    e.sigma = max_dev > 0.0 ? std::abs(e.reward_total - r0) / max_dev : 0.0;
  }
}

double HighLevelArchive::sigma_max() const {
  double s = 0.0;
  for (const auto& e : visited) s = std::max(s, e.sigma);
  return s;
}

GraspSearchRegion build_region(const Waypoint& hand_grasp, const Vec3& object_grasp,
                               double delta, double delta_min) {
  GraspSearchRegion region;
  region.delta = delta;
  const Vec3 diff = hand_grasp.pos - object_grasp;
  if (diff.norm() <= 1e-9) {
    region.box = Box{object_grasp - Vec3::Constant(delta),
                    object_grasp + Vec3::Constant(delta)};
    return region;
  }
  region.j_hat = diff.normalized();
  const Vec3 a = hand_grasp.pos + delta * region.j_hat;
  const Vec3 b = object_grasp - delta * region.j_hat;
  Vec3 lo = a.cwiseMin(b);
  Vec3 hi = a.cwiseMax(b);
  for (int k = 0; k < 3; ++k) {
    const double half = 0.5 * (hi[k] - lo[k]);
    if (half < delta_min) {
      const double mid = 0.5 * (lo[k] + hi[k]);
      lo[k] = mid - delta_min;
      hi[k] = mid + delta_min;
    }
  }
  region.box = Box{lo, hi};
  return region;
}

std::vector<Vec3> tessellate(const GraspSearchRegion& region, int m,
                             std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  const int n = 100 * m;
  std::vector<Vec3> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) samples.push_back(region.box.sample(rng));

  // k-means++ seeding
  std::vector<Vec3> centroids;
  std::uniform_int_distribution<int> first(0, n - 1);
  centroids.push_back(samples[first(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < m) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, (samples[i] - c).squaredNorm());
      d2[i] = best;
      sum += best;
    }
    std::uniform_real_distribution<double> pick(0.0, sum);
    double target = pick(rng);
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    centroids.push_back(samples[chosen]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < m; ++c) {
        const double d = (samples[i] - centroids[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Vec3> sums(m, Vec3::Zero());
    std::vector<int> counts(m, 0);
    for (int i = 0; i < n; ++i) {
      sums[assign[i]] += samples[i];
      ++counts[assign[i]];
    }
    for (int c = 0; c < m; ++c) {
      if (counts[c] > 0) centroids[c] = sums[c] / counts[c];
    }
  }
  return centroids;
}

Vec3 next_high_level(const HighLevelArchive& archive) {
  if (archive.unvisited.empty()) throw ExhaustedError("no unvisited centroids left");
  if (archive.visited.empty()) {
    const Vec3 center = archive.box_center;
    return *std::min_element(archive.unvisited.begin(), archive.unvisited.end(),
                             [&](const Vec3& a, const Vec3& b) {
                               return (a - center).squaredNorm() < (b - center).squaredNorm();
                             });
  }
  const int nv = static_cast<int>(archive.visited.size());
  const int k = std::min(archive.k, nv);
  Vec3 best = archive.unvisited.front();
  double best_score = -std::numeric_limits<double>::max();
  for (const auto& omega : archive.unvisited) {
    std::vector<double> dists;
    dists.reserve(nv);
    for (const auto& e : archive.visited) dists.push_back((omega - e.centroid).norm());
    std::vector<double> nearest = dists;
    std::nth_element(nearest.begin(), nearest.begin() + (k - 1), nearest.end());
    const double d_mean =
        std::accumulate(nearest.begin(), nearest.begin() + k, 0.0) / k;
    double score = d_mean;
    if (nv >= 2) {
      const double mean = std::accumulate(dists.begin(), dists.end(), 0.0) / nv;
      double var = 0.0;
      for (double d : dists) var += (d - mean) * (d - mean);
      var /= nv;
      score += 1.0 / std::max(var, 1e-6);
    }
    if (score > best_score) {
      best_score = score;
      best = omega;
    }
  }
  return best;
}

double sigma_of(const HighLevelArchive& archive, double reward_total) {
  double max_dev = std::abs(reward_total - archive.r0);
  for (const auto& e : archive.visited) {
    max_dev = std::max(max_dev, std::abs(e.reward_total - archive.r0));
  }
  if (max_dev <= 0.0) return 0.0;
  return std::abs(reward_total - archive.r0) / max_dev;
}

const VisitedEntry& sample_exploit(const HighLevelArchive& archive,
                                   const ExploitationPolicy& policy,
                                   std::mt19937_64& rng) {
  std::vector<double> weights;
  weights.reserve(archive.visited.size());
  for (const auto& e : archive.visited) weights.push_back(std::exp(policy.gamma * e.sigma));
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  return archive.visited[pick(rng)];
}

GraspSearchResult grasp_search(const GraspSearchRegion& region,
                               const Vec3& prior_grasp, const GraspEvalFn& evaluate,
                               const GraspSearchOptions& options) {
  std::mt19937_64 rng(options.seed);
  GraspSearchResult result;
  result.grasp = prior_grasp;

  auto log = [&](const Vec3& cand, double total, double sigma_max, bool high,
                 bool grasped) {
    if (options.logger) {
      options.logger(GraspRolloutRecord{result.rollouts_used, cand, total, sigma_max,
                                        high, grasped});
    }
  };

  // rollout of the unmodified prior grasp anchors R0
  GraspEval prior_eval = evaluate(prior_grasp);
  ++result.rollouts_used;
  result.best_reward = prior_eval.rewards.total;
  log(prior_grasp, prior_eval.rewards.total, 0.0, true, prior_eval.episode.grasped);
  if (prior_eval.episode.grasped) {
    result.grasped = true;
    return result;
  }

  HighLevelArchive archive;
  archive.k = options.k;
  archive.r0 = prior_eval.rewards.total;
  archive.box_center = region.box.center();
  archive.unvisited = tessellate(region, options.m, options.seed);

  GpOptimizer local(Bounds::from_box(region.box), options.seed ^ 0x9e3779b97f4a7c15ull);
  if (region.box.contains(prior_grasp, 1e-9)) {
    local.tell(prior_grasp, prior_eval.rewards.total);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (result.rollouts_used < options.budget) {
    const double sigma_max = archive.sigma_max();
    const double p_explore =
        std::clamp(options.policy.alpha / std::max(sigma_max, 1e-6), 0.05, 1.0);
    const bool can_explore = !archive.unvisited.empty();
    const bool can_exploit = !archive.visited.empty();
    const bool explore =
        can_explore && (!can_exploit || unit(rng) < p_explore);
    if (!can_explore && !can_exploit) break;

    Vec3 cand;
    double seed_reward = 0.0;
    bool promote_check = false;
    if (explore) {
      cand = next_high_level(archive);
      archive.unvisited.erase(
          std::remove_if(archive.unvisited.begin(), archive.unvisited.end(),
                         [&](const Vec3& c) { return (c - cand).norm() < 1e-12; }),
          archive.unvisited.end());
    } else {
      const VisitedEntry& seed = sample_exploit(archive, options.policy, rng);
      seed_reward = seed.reward_total;
      promote_check = true;
      Bounds sub;
      sub.lo = seed.centroid - Vec3::Constant(options.policy.epsilon);
      sub.hi = seed.centroid + Vec3::Constant(options.policy.epsilon);
      cand = local.ask_in(sub);
    }

    GraspEval eval = evaluate(cand);
    ++result.rollouts_used;
    const double total = eval.rewards.total;
    if (region.box.contains(cand, 1e-9)) local.tell(cand, total);

    if (explore) {
      archive.visited.push_back(VisitedEntry{cand, total, 0.0});
      archive.refresh_sigmas();
    } else if (promote_check && total > seed_reward) {
      archive.visited.push_back(VisitedEntry{cand, total, 0.0});
      archive.refresh_sigmas();
    }

    if (total > result.best_reward || eval.episode.grasped) {
      result.best_reward = std::max(result.best_reward, total);
      result.grasp = cand;
    }
    log(cand, total, archive.sigma_max(), explore, eval.episode.grasped);
    if (eval.episode.grasped) {
      result.grasped = true;
      result.grasp = cand;
      return result;
    }
  }
  return result;
}

}  // namespace view
