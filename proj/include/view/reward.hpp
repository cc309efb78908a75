#pragma once

#include "view/types.hpp"

namespace view {

/// Per-waypoint rewards r_t <= 0 (negative pixel distances) and their sum.
struct RewardSeries {
  std::vector<double> values;
  double total{0.0};

  static RewardSeries from_values(std::vector<double> v) {
    RewardSeries out;
    out.values = std::move(v);
    out.total = 0.0;
    for (double x : out.values) out.total += x;
    return out;
  }
};

/// r_t = -||robot_t - human_t||_2 in pixels, per index.
/// Throws LengthMismatchError unless the tracks are aligned.
RewardSeries waypoint_rewards(const ObjectTrack& human, const ObjectTrack& robot);

/// Resamples a per-frame pixel track at the given waypoint times by
/// linear interpolation. Throws OutOfRangeError if a waypoint time
/// falls outside [first, last] frame time.
ObjectTrack align_tracks(const ObjectTrack& track,
                         const std::vector<double>& frame_times,
                         const std::vector<double>& waypoint_times);

}  // namespace view
