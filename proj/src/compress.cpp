#include "view/compress.hpp"

#include <cmath>
#include <queue>

namespace view {

double sed(const Waypoint& prev, const Waypoint& removed, const Waypoint& next) {
  if (!(prev.t < removed.t && removed.t < next.t)) {
    throw BadOrderError("sed: timestamps must strictly increase");
  }
  const double alpha = (removed.t - prev.t) / (next.t - prev.t);
  const Vec3 interp = prev.pos + alpha * (next.pos - prev.pos);
  return (removed.pos - interp).norm();
}

namespace {

struct HeapEntry {
  double priority;
  int index;
  std::uint64_t version;
  bool operator>(const HeapEntry& other) const { return priority > other.priority; }
};

}  // namespace

Trajectory squishe(const Trajectory& traj, const CompressionSpec& spec) {
  traj.validate();
  const int n = static_cast<int>(traj.waypoints.size());

  std::vector<bool> pinned(n, false);
  pinned[0] = pinned[n - 1] = true;
  if (spec.pin_contact_changes) {
    for (int i = 1; i < n; ++i) {
      if (traj.waypoints[i].contact != traj.waypoints[i - 1].contact) pinned[i] = true;
    }
  }
  int pinned_count = 0;
  for (bool p : pinned) pinned_count += p ? 1 : 0;

  std::vector<int> prev(n), next(n);
  std::vector<double> acc(n, 0.0);
  std::vector<std::uint64_t> version(n, 0);
  std::vector<bool> removed(n, false);
  for (int i = 0; i < n; ++i) {
    prev[i] = i - 1;
    next[i] = i + 1;
  }

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
  auto push = [&](int i) {
    if (pinned[i]) return;
    const double p = acc[i] + sed(traj.waypoints[prev[i]], traj.waypoints[i],
                                  traj.waypoints[next[i]]);
    heap.push(HeapEntry{p, i, ++version[i]});
  };
  for (int i = 1; i < n - 1; ++i) push(i);

  const int target =
      spec.mode == CompressionSpec::Mode::target_count
          ? std::max(spec.target, pinned_count)
          : pinned_count;
  int remaining = n;

  while (remaining > target && !heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    if (removed[top.index] || top.version != version[top.index]) continue;
    if (spec.mode == CompressionSpec::Mode::max_error &&
        top.priority > spec.max_error) {
      break;
    }
    const int i = top.index;
    removed[i] = true;
    --remaining;
    const int p = prev[i];
    const int q = next[i];
    next[p] = q;
    prev[q] = p;
    acc[p] += top.priority;
    acc[q] += top.priority;
    push(p);
    push(q);
  }

  Trajectory out;
  out.kind = TrajKind::compressed;
  for (int i = 0; i < n; ++i) {
    if (!removed[i]) out.waypoints.push_back(traj.waypoints[i]);
  }
  return out;
}

Trajectory downsample(const Trajectory& traj, double source_hz, double target_hz) {
  traj.validate();
  const int stride = std::max(1, static_cast<int>(std::lround(source_hz / target_hz)));
  const int n = static_cast<int>(traj.waypoints.size());
  Trajectory out;
  out.kind = TrajKind::compressed;
  for (int i = 0; i < n; i += stride) out.waypoints.push_back(traj.waypoints[i]);
  if ((n - 1) % stride != 0) out.waypoints.push_back(traj.waypoints[n - 1]);
  return out;
}

}  // namespace view
