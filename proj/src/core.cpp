#include "view/core.hpp"

#include <algorithm>
#include <cmath>

namespace view {

void Trajectory::validate() const {
  if (waypoints.size() < 2) throw ViewError("trajectory needs >= 2 waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!waypoints[i].finite()) throw ViewError("non-finite waypoint");
    if (i > 0 && waypoints[i].t <= waypoints[i - 1].t) {
      throw BadOrderError("timestamps must strictly increase");
    }
  }
}

Trajectory debounce_contacts(const Trajectory& traj, int min_len) {
  Trajectory out = traj;
  const std::size_t n = out.waypoints.size();
  std::size_t i = 0;
  while (i < n) {
    if (!out.waypoints[i].contact) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && out.waypoints[j].contact) ++j;
    if (static_cast<int>(j - i) < min_len) {
      for (std::size_t k = i; k < j; ++k) out.waypoints[k].contact = false;
    }
    i = j;
  }
  return out;
}

SegmentedPrior segment_prior(const Trajectory& prior,
                             const std::vector<Waypoint>& object_track_3d) {
  const auto& wps = prior.waypoints;
  int grasp_index = -1;
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (wps[i].contact) {
      grasp_index = static_cast<int>(i);
      break;
    }
  }
  if (grasp_index < 0) throw NoContactError("prior never registers contact");
  if (static_cast<std::size_t>(grasp_index) + 1 >= wps.size()) {
    throw NoTaskError("no waypoint after the grasp point");
  }

  SegmentedPrior out;
  out.grasp_index = grasp_index;
  out.grasp.kind = prior.kind;
  out.task.kind = prior.kind;
  out.grasp.waypoints.assign(wps.begin(), wps.begin() + grasp_index + 2);
  out.task.waypoints.assign(wps.begin() + grasp_index + 1, wps.end());
  if (!object_track_3d.empty()) {
    const std::size_t idx = std::min<std::size_t>(grasp_index, object_track_3d.size() - 1);
    out.object_at_grasp = object_track_3d[idx];
  }
  return out;
}

std::vector<Trajectory> split_multi_object(const Trajectory& prior) {
  const auto& wps = prior.waypoints;
  const std::size_t n = wps.size();

  // release index = first non-contact waypoint after each contact block
  std::vector<std::size_t> cuts;
  std::size_t i = 0;
  while (i < n) {
    if (!wps[i].contact) {
      ++i;
      continue;
    }
    while (i < n && wps[i].contact) ++i;
    if (i < n) cuts.push_back(i);
  }

  std::vector<Trajectory> out;
  std::size_t begin = 0;
  for (std::size_t cut : cuts) {
    Trajectory sub;
    sub.kind = prior.kind;
    sub.waypoints.assign(wps.begin() + begin, wps.begin() + cut + 1);
    out.push_back(std::move(sub));
    begin = cut;
  }
  Trajectory tail;
  tail.kind = prior.kind;
  tail.waypoints.assign(wps.begin() + begin, wps.end());
  if (tail.waypoints.size() >= 2 || out.empty()) out.push_back(std::move(tail));
  return out;
}

}  // namespace view
