#pragma once

#include <optional>

#include "view/camera.hpp"
#include "view/types.hpp"

namespace view {

struct Detection {
  std::string tag;
  std::array<double, 4> bbox{0.0, 0.0, 0.0, 0.0};  // u0, v0, u1, v1
  PixelPoint centroid;
};

struct DepthSample {
  PixelPoint at;
  double meters{0.0};
};

/// Per-frame perception output as read from a recording file. Depth is
/// stored as sparse samples; lookups take the median of the samples in
/// a 3x3 pixel neighborhood to mimic hole-filling robustness.
struct DetectionFrame {
  double t{0.0};
  PixelPoint wrist;
  bool contact{false};
  std::vector<DepthSample> depth;
  std::vector<Detection> detections;

  std::optional<double> depth_at(const PixelPoint& p) const;
};

struct Recording {
  CameraModel camera;
  std::vector<DetectionFrame> frames;
};

Recording load_recording(const std::string& path);
void save_recording(const Recording& rec, const std::string& path);

/// One waypoint per frame with a valid wrist depth: deprojected wrist
/// position, contact flag, timestamp. Frames with missing depth are
/// skipped; fewer than 2 survivors raise TooFewFramesError.
Trajectory extract_hand_trajectory(const std::vector<DetectionFrame>& frames,
                                   const CameraModel& cam);

/// Majority vote over contact frames: counts detections whose centroid
/// falls inside square anchor boxes centered at the wrist with sides
/// anchor_scales x 64 px. Ties raise AmbiguousTagError.
std::string vote_object_tag(const std::vector<DetectionFrame>& frames,
                            const std::vector<double>& anchor_scales = {1.0, 2.0, 4.0});

struct ObjectExtraction {
  ObjectTrack track;                // pixel track, one point per frame
  std::vector<Waypoint> track_3d;   // deprojected, one per frame
};

/// Per-frame centroid track for the tagged object; frames lacking the
/// tag are filled by linear interpolation (constant at the ends).
ObjectExtraction extract_object_track(const std::vector<DetectionFrame>& frames,
                                      const std::string& tag,
                                      const CameraModel& cam);

}  // namespace view
