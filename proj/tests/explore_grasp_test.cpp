#include <doctest.h>

#include <map>
#include <random>

#include "view/explore_grasp.hpp"

using namespace view;

TEST_CASE("the search region spans the extended hand-object diagonal") {
  const Waypoint hand{Vec3{0.6, 0.2, 0.4}, true, 1.0};
  const Vec3 object{0.2, 0.2, 0.0};
  const GraspSearchRegion r = build_region(hand, object, 0.1, 0.05);
  const Vec3 diff = (hand.pos - object).normalized();
  CHECK((r.j_hat - diff).norm() < 1e-12);

  const Vec3 a = hand.pos + 0.1 * diff;
  const Vec3 b = object - 0.1 * diff;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(a[k] - b[k]) >= 0.1) {
      CHECK(r.box.lo[k] == doctest::Approx(std::min(a[k], b[k])));
      CHECK(r.box.hi[k] == doctest::Approx(std::max(a[k], b[k])));
    }
  }
  CHECK(r.box.contains(hand.pos));
  CHECK(r.box.contains(object));
}

TEST_CASE("thin axes inflate to the minimum half-width") {
  const Waypoint hand{Vec3{0.5, 0.5, 0.3}, true, 1.0};
  const Vec3 object{0.5, 0.5, 0.0};  // aligned: x and y spans are thin
  const GraspSearchRegion r = build_region(hand, object, 0.1, 0.05);
  CHECK(r.box.extent().x() == doctest::Approx(0.1));
  CHECK(r.box.extent().y() == doctest::Approx(0.1));
  CHECK(r.box.extent().z() == doctest::Approx(0.5));
}

TEST_CASE("coincident hand and object fall back to a cube") {
  const Waypoint hand{Vec3{0.5, 0.5, 0.1}, true, 1.0};
  const GraspSearchRegion r = build_region(hand, hand.pos, 0.1, 0.05);
  CHECK((r.box.center() - hand.pos).norm() < 1e-12);
  CHECK((r.box.extent() - Vec3::Constant(0.2)).norm() < 1e-12);
}

TEST_CASE("tessellation is contained, deterministic, and spread out") {
  GraspSearchRegion region;
  region.box = Box{Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 0.5, 0.25}};
  const auto centroids = tessellate(region, 30, 13);
  REQUIRE(centroids.size() == 30);
  for (const auto& c : centroids) CHECK(region.box.contains(c, 1e-12));

  const auto again = tessellate(region, 30, 13);
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    CHECK((centroids[i] - again[i]).norm() == 0.0);
  }

  double min_gap = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    for (std::size_t j = i + 1; j < centroids.size(); ++j) {
      min_gap = std::min(min_gap, (centroids[i] - centroids[j]).norm());
    }
  }
  CHECK(min_gap > 0.02);
}

TEST_CASE("the first high-level pick is the centroid nearest the box center") {
  HighLevelArchive archive;
  archive.box_center = Vec3{0.5, 0.5, 0.5};
  archive.unvisited = {Vec3{0.0, 0.0, 0.0}, Vec3{0.6, 0.5, 0.5}, Vec3{1.0, 1.0, 1.0}};
  CHECK((next_high_level(archive) - Vec3{0.6, 0.5, 0.5}).norm() < 1e-12);

  archive.unvisited.clear();
  CHECK_THROWS_AS(next_high_level(archive), ExhaustedError);
}

TEST_CASE("novelty scoring matches a hand-computed example") {
  HighLevelArchive archive;
  archive.k = 2;
  archive.visited = {VisitedEntry{Vec3{0.0, 0.0, 0.0}, 0.0, 0.0},
                     VisitedEntry{Vec3{1.0, 0.0, 0.0}, 0.0, 0.0},
                     VisitedEntry{Vec3{0.0, 1.0, 0.0}, 0.0, 0.0}};
  const Vec3 cand_a{0.1, 0.1, 0.0};   // crowded corner
  const Vec3 cand_b{2.0, 2.0, 0.0};   // far from everything
  archive.unvisited = {cand_a, cand_b};

  auto score = [&](const Vec3& omega) {
    std::vector<double> d;
    for (const auto& e : archive.visited) d.push_back((omega - e.centroid).norm());
    std::sort(d.begin(), d.end());
    const double d_mean = 0.5 * (d[0] + d[1]);
    double mean = (d[0] + d[1] + d[2]) / 3.0;
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    var /= 3.0;
    return d_mean + 1.0 / std::max(var, 1e-6);
  };
  const Vec3 expect = score(cand_a) > score(cand_b) ? cand_a : cand_b;
  CHECK((next_high_level(archive) - expect).norm() < 1e-12);

  // with a single visited entry the variance regularizer is dropped and
  // novelty reduces to plain distance
  archive.visited.resize(1);
  CHECK((next_high_level(archive) - cand_b).norm() < 1e-12);
}

TEST_CASE("sigma normalizes deviation from the prior reward") {
  HighLevelArchive archive;
  archive.r0 = -10.0;
  archive.visited = {VisitedEntry{Vec3::Zero(), -10.0, 0.0},
                     VisitedEntry{Vec3::UnitX(), -6.0, 0.0},
                     VisitedEntry{Vec3::UnitY(), -18.0, 0.0}};
  archive.refresh_sigmas();
  CHECK(std::abs(archive.visited[0].sigma - 0.0) < 1e-12);
  CHECK(std::abs(archive.visited[1].sigma - 0.5) < 1e-12);
  CHECK(std::abs(archive.visited[2].sigma - 1.0) < 1e-12);
  CHECK(archive.sigma_max() == doctest::Approx(1.0));
  CHECK(sigma_of(archive, -14.0) == doctest::Approx(0.5));
}

TEST_CASE("exploitation samples follow the softmax over sigma") {
  HighLevelArchive archive;
  archive.visited = {VisitedEntry{Vec3::Zero(), 0.0, 0.1},
                     VisitedEntry{Vec3::UnitX(), 0.0, 0.9},
                     VisitedEntry{Vec3::UnitY(), 0.0, 0.5}};
  ExploitationPolicy policy;
  policy.gamma = 5.0;

  double z = 0.0;
  std::vector<double> expect;
  for (const auto& e : archive.visited) {
    expect.push_back(std::exp(policy.gamma * e.sigma));
    z += expect.back();
  }
  double total = 0.0;
  for (double& w : expect) {
    w /= z;
    total += w;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);

  std::mt19937_64 rng(31);
  const int draws = 20000;
  std::map<double, int> counts;
  for (int i = 0; i < draws; ++i) {
    counts[sample_exploit(archive, policy, rng).sigma] += 1;
  }
  CHECK(std::abs(counts[0.1] / double(draws) - expect[0]) < 0.01);
  CHECK(std::abs(counts[0.9] / double(draws) - expect[1]) < 0.01);
  CHECK(std::abs(counts[0.5] / double(draws) - expect[2]) < 0.01);
}

TEST_CASE("grasp search starts from the prior and stops when it grasps") {
  GraspSearchRegion region;
  region.box = Box{Vec3{0.0, 0.0, 0.0}, Vec3{0.4, 0.4, 0.2}};
  const Vec3 prior{0.35, 0.35, 0.15};
  const Vec3 target{0.1, 0.1, 0.05};

  int evals = 0;
  Vec3 first_candidate;
  GraspEvalFn eval = [&](const Vec3& cand) {
    if (evals == 0) first_candidate = cand;
    ++evals;
    GraspEval out;
    out.episode.grasped = (cand - target).norm() <= 0.04;
    out.rewards = RewardSeries::from_values({-(cand - target).norm()});
    return out;
  };

  GraspSearchOptions options;
  options.seed = 5;
  options.budget = 60;
  const GraspSearchResult res = grasp_search(region, prior, eval, options);
  CHECK((first_candidate - prior).norm() == 0.0);
  CHECK(res.grasped);
  CHECK(res.rollouts_used == evals);
  CHECK(res.rollouts_used <= options.budget);
  CHECK((res.grasp - target).norm() <= 0.04);
}

TEST_CASE("an impossible grasp exhausts the budget without success") {
  GraspSearchRegion region;
  region.box = Box{Vec3{0.0, 0.0, 0.0}, Vec3{0.4, 0.4, 0.2}};
  GraspEvalFn eval = [](const Vec3&) {
    GraspEval out;
    out.rewards = RewardSeries::from_values({-1.0});
    return out;
  };
  GraspSearchOptions options;
  options.seed = 5;
  options.budget = 25;
  const GraspSearchResult res = grasp_search(region, Vec3{0.2, 0.2, 0.1}, eval, options);
  CHECK_FALSE(res.grasped);
  CHECK(res.rollouts_used <= 25);
}
