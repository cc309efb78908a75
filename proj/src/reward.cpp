#include "view/reward.hpp"

#include <algorithm>
#include <cmath>

namespace view {

RewardSeries waypoint_rewards(const ObjectTrack& human, const ObjectTrack& robot) {
  if (human.points.size() != robot.points.size()) {
    throw LengthMismatchError("tracks must be aligned to the same length");
  }
  RewardSeries out;
  out.values.reserve(human.points.size());
  for (std::size_t i = 0; i < human.points.size(); ++i) {
    const double r = -pixel_distance(robot.points[i], human.points[i]);
    out.values.push_back(r);
    out.total += r;
  }
  return out;
}

ObjectTrack align_tracks(const ObjectTrack& track,
                         const std::vector<double>& frame_times,
                         const std::vector<double>& waypoint_times) {
  if (track.points.size() != frame_times.size() || frame_times.empty()) {
    throw LengthMismatchError("track and frame times must match");
  }
  const double t0 = frame_times.front();
  const double t1 = frame_times.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));

  ObjectTrack out;
  out.tag = track.tag;
  out.points.reserve(waypoint_times.size());
  for (double t : waypoint_times) {
    if (t < t0 - slack || t > t1 + slack) {
      throw OutOfRangeError("waypoint time outside the frame range");
    }
    const double tc = std::clamp(t, t0, t1);
    auto it = std::upper_bound(frame_times.begin(), frame_times.end(), tc);
    if (it == frame_times.begin()) ++it;
    if (it == frame_times.end()) --it;
    const std::size_t j = static_cast<std::size_t>(it - frame_times.begin());
    const double ta = frame_times[j - 1];
    const double tb = frame_times[j];
    const double alpha = tb > ta ? (tc - ta) / (tb - ta) : 0.0;
    const PixelPoint& a = track.points[j - 1];
    const PixelPoint& b = track.points[j];
    out.points.push_back(PixelPoint{a.u + alpha * (b.u - a.u), a.v + alpha * (b.v - a.v)});
  }
  return out;
}

}  // namespace view
