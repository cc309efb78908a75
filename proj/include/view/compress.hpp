#pragma once

#include "view/types.hpp"

namespace view {

struct CompressionSpec {
  enum class Mode { target_count, max_error };

  Mode mode{Mode::max_error};
  int target{2};            // target_count mode
  double max_error{0.01};   // meters, max_error mode
  bool pin_contact_changes{true};

  static CompressionSpec count(int n) {
    CompressionSpec s;
    s.mode = Mode::target_count;
    s.target = n;
    return s;
  }
  static CompressionSpec error(double mu) {
    CompressionSpec s;
    s.mode = Mode::max_error;
    s.max_error = mu;
    return s;
  }
};

/// Synchronized Euclidean distance: the gap between the removed point
/// and the time-linear interpolation of its neighbors at removed.t.
double sed(const Waypoint& prev, const Waypoint& removed, const Waypoint& next);

/// SQUISHE priority-queue simplification. Endpoints are always kept;
/// with pin_contact_changes every waypoint whose contact flag differs
/// from its predecessor is unremovable. On removal a point's
/// accumulated priority transfers to both neighbors.
Trajectory squishe(const Trajectory& traj, const CompressionSpec& spec);

/// Fixed-rate downsampler used as an ablation control. Retains the
/// endpoints but, unlike squishe, pays no attention to contact changes.
Trajectory downsample(const Trajectory& traj, double source_hz, double target_hz);

}  // namespace view
