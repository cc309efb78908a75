#pragma once

#include "view/types.hpp"

namespace view {

/// Clears contact blocks shorter than min_len waypoints. Single-frame
/// detector flickers otherwise create spurious subtasks on raw input.
Trajectory debounce_contacts(const Trajectory& traj, int min_len = 2);

/// Splits a prior at the first contact onset. The grasp segment covers
/// indices [0, grasp_index + 1]; the task segment covers
/// [grasp_index + 1, end]; the boundary waypoint is duplicated verbatim.
/// object_track_3d supplies the object position at the grasp index.
SegmentedPrior segment_prior(const Trajectory& prior,
                             const std::vector<Waypoint>& object_track_3d);

/// One sub-trajectory per contiguous contact block. Each sub-trajectory
/// runs from the previous release (or start) through the next release
/// (or end). Zero contact blocks yield a single passthrough copy.
std::vector<Trajectory> split_multi_object(const Trajectory& prior);

}  // namespace view
