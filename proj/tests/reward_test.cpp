#include <doctest.h>

#include "view/reward.hpp"

using namespace view;

namespace {

ObjectTrack track_of(std::initializer_list<PixelPoint> pts) {
  ObjectTrack t;
  t.points = pts;
  return t;
}

}  // namespace

TEST_CASE("rewards are negative pixel distances and sum to the total") {
  const ObjectTrack human = track_of({{0.0, 0.0}, {3.0, 4.0}, {10.0, 0.0}});
  const ObjectTrack robot = track_of({{0.0, 0.0}, {0.0, 0.0}, {4.0, 8.0}});
  const RewardSeries r = waypoint_rewards(human, robot);
  REQUIRE(r.values.size() == 3);
  CHECK(r.values[0] == doctest::Approx(0.0));
  CHECK(r.values[1] == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(r.values[2] == doctest::Approx(-10.0).epsilon(1e-12));
  double sum = 0.0;
  for (double v : r.values) {
    CHECK(v <= 0.0);
    sum += v;
  }
  CHECK(std::abs(r.total - sum) < 1e-12);
}

TEST_CASE("mismatched track lengths are rejected") {
  const ObjectTrack a = track_of({{0.0, 0.0}, {1.0, 1.0}});
  const ObjectTrack b = track_of({{0.0, 0.0}});
  CHECK_THROWS_AS(waypoint_rewards(a, b), LengthMismatchError);
}

TEST_CASE("alignment interpolates the pixel track linearly in time") {
  const ObjectTrack track = track_of({{0.0, 0.0}, {10.0, 20.0}, {30.0, 20.0}});
  const std::vector<double> frames{0.0, 1.0, 2.0};
  const ObjectTrack out = align_tracks(track, frames, {0.0, 0.5, 1.25, 2.0});
  REQUIRE(out.size() == 4);
  CHECK(out.points[0].u == doctest::Approx(0.0));
  CHECK(out.points[1].u == doctest::Approx(5.0));
  CHECK(out.points[1].v == doctest::Approx(10.0));
  CHECK(out.points[2].u == doctest::Approx(15.0));
  CHECK(out.points[2].v == doctest::Approx(20.0));
  CHECK(out.points[3].u == doctest::Approx(30.0));
}

TEST_CASE("alignment rejects times outside the recording") {
  const ObjectTrack track = track_of({{0.0, 0.0}, {1.0, 1.0}});
  const std::vector<double> frames{0.0, 1.0};
  CHECK_THROWS_AS(align_tracks(track, frames, {-0.1}), OutOfRangeError);
  CHECK_THROWS_AS(align_tracks(track, frames, {1.1}), OutOfRangeError);
}
