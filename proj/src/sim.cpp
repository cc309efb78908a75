#include "view/sim.hpp"

#include <cmath>
#include <random>

namespace view {

const char* task_name(TaskSpec::Kind kind) {
  switch (kind) {
    case TaskSpec::Kind::pick: return "pick";
    case TaskSpec::Kind::push: return "push";
    case TaskSpec::Kind::move: return "move";
  }
  return "unknown";
}

SimWorld make_default_world(const Vec3& object_pos) {
  SimWorld world;
  world.object_pos = object_pos;
  world.object_pos.z() = world.table_height + world.object_half_extent;
  world.cam.fx = 600.0;
  world.cam.fy = 600.0;
  world.cam.cx = 320.0;
  world.cam.cy = 240.0;
  // elevated front camera aimed at the table center; the oblique view
  // keeps vertical motion visible in pixel space
  const Vec3 cam_pos{0.5, -0.35, 1.2};
  const Vec3 look_at{0.5, 0.5, 0.0};
  const Vec3 zc = (look_at - cam_pos).normalized();
  const Vec3 xc = Vec3::UnitX();
  const Vec3 yc = zc.cross(xc).normalized();
  Eigen::Matrix4d ext = Eigen::Matrix4d::Identity();
  ext.block<3, 1>(0, 0) = xc;
  ext.block<3, 1>(0, 1) = yc;
  ext.block<3, 1>(0, 2) = zc;
  ext.block<3, 1>(0, 3) = cam_pos;
  world.cam.extrinsic = ext;
  world.cam.validate();
  return world;
}

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

EpisodeResult rollout(const SimWorld& world, const TaskSpec& task,
                      const Trajectory& traj) {
  traj.validate();
  const auto& wps = traj.waypoints;
  const int n = static_cast<int>(wps.size());
  const double rest_z = world.table_height + world.object_half_extent;

  int grasp_idx = -1;
  for (int i = 0; i < n; ++i) {
    if (wps[i].contact) {
      grasp_idx = i;
      break;
    }
  }

  EpisodeResult out;
  out.robot_traj = traj;
  out.object_track.tag = "cup";

  Vec3 object = world.object_pos;
  Vec3 ee = wps[0].pos;
  bool attached = false;
  Vec3 offset = Vec3::Zero();
  double nudge_budget = 0.02;  // total sweep displacement per rollout

  auto record = [&]() {
    out.object_track_3d.push_back(object);
    out.object_track.points.push_back(project(world.cam, object));
  };

  if (!world.workspace.contains(ee, 1e-9)) {
    out.out_of_workspace = true;
    for (int i = 0; i < n; ++i) record();
    return out;
  }
  record();

  for (int i = 1; i < n; ++i) {
    if (!world.workspace.contains(wps[i].pos, 1e-9)) {
      out.out_of_workspace = true;
      for (int k = i; k < n; ++k) record();
      return out;
    }
    const Vec3 target = wps[i].pos;
    if (attached) {
      object = target + offset;
      if (object.z() < rest_z) object.z() = rest_z;
    } else if (!wps[i - 1].contact) {
      // near-miss sweep: nudge the object along the motion direction,
      // unless the segment ends in a clean grasp
      const bool will_attach =
          wps[i].contact && (object - target).norm() <= world.grasp_radius;
      const double d = point_segment_distance(object, ee, target);
      if (!will_attach && d < world.grasp_radius && nudge_budget > 0.0) {
        Vec3 dir = target - ee;
        if (dir.norm() > 1e-12) {
          dir.normalize();
          const double shift =
              std::min({world.grasp_radius - d, 0.02, nudge_budget});
          nudge_budget -= shift;
          object += dir * shift;
          object.z() = rest_z;
          object = world.workspace.clamp(object);
          object.z() = std::max(object.z(), rest_z);
        }
      }
    }
    ee = target;

    if (grasp_idx >= 0 && i == grasp_idx + 1) {
      out.grasped = attached || (object - ee).norm() <= world.grasp_radius;
    }
    if (!attached && wps[i].contact && (object - ee).norm() <= world.grasp_radius) {
      attached = true;
      offset = object - ee;
    } else if (attached && !wps[i].contact) {
      attached = false;
      object.z() = rest_z;  // settle onto the table
    }
    record();
  }

  const Vec3 goal = task.goal_pos;
  const double planar =
      std::hypot(object.x() - goal.x(), object.y() - goal.y());
  switch (task.kind) {
    case TaskSpec::Kind::pick:
      out.success = out.grasped &&
                    object.z() >= world.table_height + task.lift_height - 1e-9;
      break;
    case TaskSpec::Kind::push:
      out.success = planar <= task.success_tol;
      break;
    case TaskSpec::Kind::move:
      out.success = out.grasped && planar <= task.success_tol;
      break;
  }
  return out;
}

Trajectory gaussian_distort(const Trajectory& traj, double sigma,
                            std::uint64_t rng_seed) {
  Trajectory out = traj;
  if (sigma <= 0.0) return out;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i = 1; i < out.waypoints.size(); ++i) {
    for (int k = 0; k < 3; ++k) out.waypoints[i].pos[k] += noise(rng);
  }
  return out;
}

Trajectory tanh_distort(const Trajectory& traj, const TanhNoiseField& field) {
  Trajectory out = traj;
  for (auto& w : out.waypoints) {
    for (int k = 0; k < 3; ++k) {
      w.pos[k] += field.amplitude * std::tanh((w.pos[k] - field.centroid[k]) / field.lambda);
    }
  }
  return out;
}

namespace {

struct DemoScript {
  std::vector<Vec3> positions;
  std::vector<bool> contacts;

  void line_to(const Vec3& target, int frames, bool contact) {
    const Vec3 from = positions.back();
    for (int i = 1; i <= frames; ++i) {
      const double a = static_cast<double>(i) / frames;
      positions.push_back(from + a * (target - from));
      contacts.push_back(contact);
    }
  }
};

}  // namespace

Demo synth_demo(const SimWorld& world, const TaskSpec& task, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  const double dt = 0.05;  // 20 Hz
  const Vec3 object = world.object_pos;
  const double top_z = world.table_height + 0.30;

  Vec3 start = object + Vec3{-0.25 + jitter(rng), -0.18 + jitter(rng), 0.22 + jitter(rng)};
  start = world.workspace.clamp(start);

  DemoScript script;
  script.positions.push_back(start);
  script.contacts.push_back(false);

  // Contact begins on arrival at the object; for move it ends on arrival
  // at the place point so the release coincides with the path corner.
  switch (task.kind) {
    case TaskSpec::Kind::pick: {
      std::uniform_int_distribution<int> app(16, 22);
      const int n_app = app(rng);
      script.line_to(object, n_app, false);
      script.contacts.back() = true;
      script.line_to(Vec3{object.x(), object.y(), top_z}, 20, true);
      break;
    }
    case TaskSpec::Kind::push: {
      std::uniform_int_distribution<int> app(16, 22);
      const int n_app = app(rng);
      script.line_to(object, n_app, false);
      script.contacts.back() = true;
      script.line_to(Vec3{task.goal_pos.x(), task.goal_pos.y(), object.z()}, 20, true);
      break;
    }
    case TaskSpec::Kind::move: {
      std::uniform_int_distribution<int> app(13, 17);
      const int n_app = app(rng);
      script.line_to(object, n_app, false);
      script.contacts.back() = true;
      const Vec3 place{task.goal_pos.x(), task.goal_pos.y(), object.z()};
      script.line_to(place, 16, true);
      script.contacts.back() = false;  // release at the place point
      script.line_to(Vec3{place.x(), place.y(), top_z}, 8, false);
      break;
    }
  }

  Demo demo;
  demo.traj.kind = TrajKind::raw;
  demo.object_track.tag = "cup";
  const double rest_z = world.table_height + world.object_half_extent;
  Vec3 obj = object;
  bool released = false;
  for (std::size_t i = 0; i < script.positions.size(); ++i) {
    const Vec3& hand = script.positions[i];
    if (!world.workspace.contains(hand, 1e-9)) {
      throw InfeasibleError("demonstration leaves the workspace");
    }
    if (script.contacts[i] && !released) {
      obj = hand;
      if (obj.z() < rest_z) obj.z() = rest_z;
    } else if (i > 0 && script.contacts[i - 1] && !script.contacts[i] && !released) {
      // carried into the release frame, then set down
      obj = hand;
      released = true;
      obj.z() = rest_z;
    }
    const double t = i * dt;
    demo.traj.waypoints.push_back(Waypoint{hand, script.contacts[i], t});
    demo.frame_times.push_back(t);
    demo.object_track_3d.push_back(obj);
    demo.object_track.points.push_back(project(world.cam, obj));
  }
  return demo;
}

double pixel_tolerance(const SimWorld& world) {
  const PixelPoint a = project(world.cam, world.object_pos);
  const PixelPoint b =
      project(world.cam, world.object_pos + Vec3{0.05, 0.0, 0.0});
  return pixel_distance(a, b);
}

}  // namespace view
