#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace view {

using Vec3 = Eigen::Vector3d;

class ViewError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define VIEW_ERROR(Name)                                          \
  class Name : public ViewError {                                 \
  public:                                                         \
    explicit Name(const std::string& msg) : ViewError(msg) {}     \
  }

VIEW_ERROR(NoContactError);
VIEW_ERROR(NoTaskError);
VIEW_ERROR(BadDepthError);
VIEW_ERROR(TooFewFramesError);
VIEW_ERROR(NoCandidatesError);
VIEW_ERROR(AmbiguousTagError);
VIEW_ERROR(TagAbsentError);
VIEW_ERROR(BadOrderError);
VIEW_ERROR(BehindCameraError);
VIEW_ERROR(LengthMismatchError);
VIEW_ERROR(OutOfRangeError);
VIEW_ERROR(OutOfWorkspaceError);
VIEW_ERROR(InfeasibleError);
VIEW_ERROR(CoincidentError);
VIEW_ERROR(ExhaustedError);
VIEW_ERROR(OutOfBoundsError);
VIEW_ERROR(EmptyDatasetError);

#undef VIEW_ERROR

/// 3D position in the robot frame plus contact flag and timestamp.
/// The atom every trajectory is built from.
struct Waypoint {
  Vec3 pos{0.0, 0.0, 0.0};
  bool contact{false};
  double t{0.0};

  bool finite() const {
    return pos.allFinite() && std::isfinite(t) && t >= 0.0;
  }
};

enum class TrajKind { raw, compressed, corrected, solved };

struct Trajectory {
  std::vector<Waypoint> waypoints;
  TrajKind kind{TrajKind::raw};

  std::size_t size() const { return waypoints.size(); }
  const Waypoint& operator[](std::size_t i) const { return waypoints[i]; }
  Waypoint& operator[](std::size_t i) { return waypoints[i]; }

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(waypoints.size());
    for (const auto& w : waypoints) out.push_back(w.t);
    return out;
  }

  // length >= 2, finite coordinates, strictly increasing timestamps
  void validate() const;
};

/// Real-valued pixel coordinates (u = column, v = row).
struct PixelPoint {
  double u{0.0};
  double v{0.0};
};

inline double pixel_distance(const PixelPoint& a, const PixelPoint& b) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  return std::sqrt(du * du + dv * dv);
}

/// Per-waypoint object centroid in pixel space.
struct ObjectTrack {
  std::vector<PixelPoint> points;
  std::string tag;

  std::size_t size() const { return points.size(); }
};

/// Axis-aligned box, used for workspaces and search regions.
struct Box {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{0.0, 0.0, 0.0};

  bool contains(const Vec3& p, double slack = 0.0) const {
    for (int i = 0; i < 3; ++i) {
      if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
    }
    return true;
  }

  Vec3 clamp(const Vec3& p) const {
    Vec3 out = p;
    for (int i = 0; i < 3; ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
    return out;
  }

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }

  Box intersect(const Box& other) const {
    Box out;
    out.lo = lo.cwiseMax(other.lo);
    out.hi = hi.cwiseMin(other.hi);
    // collapse empty axes to the midpoint of the overlap boundary
    for (int i = 0; i < 3; ++i) {
      if (out.lo[i] > out.hi[i]) {
        const double mid = 0.5 * (out.lo[i] + out.hi[i]);
        out.lo[i] = out.hi[i] = mid;
      }
    }
    return out;
  }

  template <typename Rng>
  Vec3 sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
    return out;
  }
};

/// Prior split at the first contact onset. The shared waypoint (index
/// grasp_index + 1 of the source) ends the grasp segment and begins the
/// task segment.
struct SegmentedPrior {
  Trajectory grasp;
  Trajectory task;
  int grasp_index{0};
  Waypoint object_at_grasp;
};

}  // namespace view
