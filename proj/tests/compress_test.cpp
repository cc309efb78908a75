#include <doctest.h>

#include <random>

#include "view/compress.hpp"
#include "view/sim.hpp"

using namespace view;

TEST_CASE("sed matches a direct interpolation computed independently") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.1, 2.0);
  for (int i = 0; i < 1000; ++i) {
    Waypoint a{Vec3{coord(rng), coord(rng), coord(rng)}, false, gap(rng)};
    Waypoint b{Vec3{coord(rng), coord(rng), coord(rng)}, false, a.t + gap(rng)};
    Waypoint c{Vec3{coord(rng), coord(rng), coord(rng)}, false, b.t + gap(rng)};
    const double u = (b.t - a.t) / (c.t - a.t);
    double expect = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double interp = (1.0 - u) * a.pos[k] + u * c.pos[k];
      expect += (b.pos[k] - interp) * (b.pos[k] - interp);
    }
    expect = std::sqrt(expect);
    CHECK(std::abs(sed(a, b, c) - expect) < 1e-12);
  }
}

TEST_CASE("sed requires strictly increasing timestamps") {
  const Waypoint a{Vec3::Zero(), false, 0.0};
  const Waypoint b{Vec3::Zero(), false, 1.0};
  CHECK_THROWS_AS(sed(b, a, b), BadOrderError);
}

TEST_CASE("demo compression keeps three waypoints for pick and push, four for move") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SimWorld world = make_default_world(Vec3{0.62, 0.55, 0.0});
    for (TaskSpec::Kind kind :
         {TaskSpec::Kind::pick, TaskSpec::Kind::push, TaskSpec::Kind::move}) {
      TaskSpec task;
      task.kind = kind;
      task.goal_pos = world.object_pos + Vec3{0.2, 0.12, 0.0};
      const Demo demo = synth_demo(world, task, seed);
      CHECK(demo.traj.size() >= 35);
      const Trajectory c = squishe(demo.traj, CompressionSpec::error(0.01));
      const std::size_t expect = kind == TaskSpec::Kind::move ? 4 : 3;
      CHECK(c.size() == expect);
    }
  }
}

TEST_CASE("compression pins endpoints and contact changes") {
  Trajectory t;
  for (int i = 0; i < 20; ++i) {
    const bool contact = i >= 8 && i < 15;
    t.waypoints.push_back(
        Waypoint{Vec3{0.05 * i, std::sin(0.8 * i), 0.0}, contact, 0.05 * i});
  }
  const Trajectory c = squishe(t, CompressionSpec::error(0.5));
  CHECK(c.waypoints.front().t == t.waypoints.front().t);
  CHECK(c.waypoints.back().t == t.waypoints.back().t);
  bool onset = false, release = false;
  for (const auto& w : c.waypoints) {
    if (w.t == t[8].t) onset = true;
    if (w.t == t[15].t) release = true;
  }
  CHECK(onset);
  CHECK(release);
}

TEST_CASE("target-count mode is exact and idempotent") {
  Trajectory t;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    t.waypoints.push_back(
        Waypoint{Vec3{coord(rng), coord(rng), coord(rng)}, false, 0.1 * i});
  }
  const Trajectory c = squishe(t, CompressionSpec::count(7));
  CHECK(c.size() == 7);
  const Trajectory cc = squishe(c, CompressionSpec::count(7));
  REQUIRE(cc.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((cc[i].pos - c[i].pos).norm() == 0.0);
  }
}

TEST_CASE("a lone outlier survives aggressive compression") {
  Trajectory t;
  for (int i = 0; i < 21; ++i) {
    Vec3 p{0.05 * i, 0.0, 0.0};
    if (i == 10) p.y() = 0.5;
    t.waypoints.push_back(Waypoint{p, false, 0.1 * i});
  }
  const Trajectory c = squishe(t, CompressionSpec::count(3));
  REQUIRE(c.size() == 3);
  CHECK(c[1].pos.y() == doctest::Approx(0.5));
}

TEST_CASE("downsampling keeps endpoints but not contact changes") {
  Trajectory t;
  for (int i = 0; i < 41; ++i) {
    // onset at frame 17 falls off the 5 Hz grid
    t.waypoints.push_back(Waypoint{Vec3{0.01 * i, 0.0, 0.0}, i >= 17, 0.05 * i});
  }
  const Trajectory five = downsample(t, 20.0, 5.0);
  CHECK(five.size() == 11);
  CHECK(five.waypoints.front().t == t.waypoints.front().t);
  CHECK(five.waypoints.back().t == t.waypoints.back().t);
  bool kept_onset = false;
  for (const auto& w : five.waypoints) {
    if (w.t == t[17].t) kept_onset = true;
  }
  CHECK_FALSE(kept_onset);

  const Trajectory full = downsample(t, 20.0, 20.0);
  CHECK(full.size() == t.size());
}
