#pragma once

#include "view/camera.hpp"
#include "view/types.hpp"

namespace view {

/// Single rigid object on a table inside a boxed workspace, observed by
/// a fixed overhead camera.
struct SimWorld {
  Vec3 object_pos{0.5, 0.5, 0.03};
  double object_half_extent{0.03};
  double table_height{0.0};
  double grasp_radius{0.04};
  Box workspace{Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 1.0, 0.5}};
  CameraModel cam;
};

struct TaskSpec {
  enum class Kind { pick, push, move };

  Kind kind{Kind::pick};
  Vec3 goal_pos{0.0, 0.0, 0.0};  // unused for pick
  double lift_height{0.10};
  double success_tol{0.05};
};

const char* task_name(TaskSpec::Kind kind);

struct EpisodeResult {
  Trajectory robot_traj;
  ObjectTrack object_track;        // projected object centroid per waypoint
  std::vector<Vec3> object_track_3d;
  bool grasped{false};
  bool success{false};
  bool out_of_workspace{false};
  int rollout_index{0};
};

/// Deterministic workspace-dependent distortion
/// eta = amplitude * tanh((xi - centroid) / lambda), coordinate-wise.
struct TanhNoiseField {
  Vec3 centroid{1.2, 1.2, 0.6};
  double lambda{0.6};
  double amplitude{0.19};
};

/// Default desk-scale world: 1 x 1 x 0.5 m workspace, overhead camera.
SimWorld make_default_world(const Vec3& object_xy_pos);

/// Executes a waypoint trajectory kinematically. The end-effector moves
/// linearly between waypoints; a contact waypoint within grasp_radius of
/// the object attaches it, and the first non-contact waypoint after
/// attachment releases it (the object settles onto the table). Sweeps of
/// non-contact segments that pass within grasp_radius nudge the object
/// by up to 2 cm, which is the near-miss signal grasp exploration uses.
EpisodeResult rollout(const SimWorld& world, const TaskSpec& task,
                      const Trajectory& traj);

/// i.i.d. zero-mean Gaussian offsets on every coordinate of every
/// waypoint except the first. Contact flags unchanged.
Trajectory gaussian_distort(const Trajectory& traj, double sigma,
                            std::uint64_t rng_seed);

/// Applies the tanh field offset to every waypoint position.
Trajectory tanh_distort(const Trajectory& traj, const TanhNoiseField& field);

struct Demo {
  Trajectory traj;                 // raw, ~40 waypoints at 20 Hz
  ObjectTrack object_track;        // per-frame pixel track
  std::vector<Vec3> object_track_3d;
  std::vector<double> frame_times;
};

/// Scripted straight-segment demonstration (approach, grasp, manipulate)
/// densely sampled at 20 Hz; segment durations are jittered by the seed.
/// A rollout of the returned trajectory succeeds by construction.
Demo synth_demo(const SimWorld& world, const TaskSpec& task, std::uint64_t rng_seed);

/// success_tol converted to pixels at the object's depth.
double pixel_tolerance(const SimWorld& world);

}  // namespace view
