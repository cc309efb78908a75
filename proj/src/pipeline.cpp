#include "view/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace view {

const char* noise_name(NoiseModel model) {
  switch (model) {
    case NoiseModel::none: return "none";
    case NoiseModel::gaussian: return "gaussian";
    case NoiseModel::tanh_field: return "tanh";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& ablation,
                          int cell, int trial) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(base);
  for (char c : ablation) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  mix(static_cast<std::uint64_t>(cell));
  mix(static_cast<std::uint64_t>(trial));
  return h;
}

double task_box_half_width(const RunConfig& config) {
  if (config.eps_task > 0.0) return config.eps_task;
  switch (config.noise) {
    case NoiseModel::none: return 0.15;
    case NoiseModel::gaussian: return std::max(0.15, 3.0 * config.sigma);
    case NoiseModel::tanh_field: return 0.32;
  }
  return 0.15;
}

namespace {

Vec3 lerp_track(const std::vector<Vec3>& points, const std::vector<double>& times,
                double t) {
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double a = (t - times[j - 1]) / (times[j] - times[j - 1]);
  return points[j - 1] + a * (points[j] - points[j - 1]);
}

Trajectory clamp_to(const Box& box, const Trajectory& traj) {
  Trajectory out = traj;
  for (auto& w : out.waypoints) w.pos = box.clamp(w.pos);
  return out;
}

TaskSpec make_task(const RunConfig& config, const SimWorld& world) {
  TaskSpec task;
  task.kind = config.task;
  Vec3 goal = world.object_pos + Vec3{0.2, 0.12, 0.0};
  goal.x() = std::clamp(goal.x(), 0.05, 0.95);
  goal.y() = std::clamp(goal.y(), 0.05, 0.95);
  goal.z() = world.object_pos.z();
  task.goal_pos = goal;
  return task;
}

}  // namespace

TrialDetail run_view_trial(const RunConfig& config, std::uint64_t seed,
                           const ResidualModel* residual) {
  const auto t_start = std::chrono::steady_clock::now();
  TrialDetail detail;
  detail.record.seed = seed;

  std::mt19937_64 rng(seed);
  Vec3 object = config.object_pos;
  if (config.randomize_object) {
    std::uniform_real_distribution<double> span(0.3, 0.75);
    object = Vec3{span(rng), span(rng), 0.0};
  }
  SimWorld world = make_default_world(object);
  const TaskSpec task = make_task(config, world);
  const Demo demo = synth_demo(world, task, rng());

  Trajectory prior =
      config.compression == CompressionKind::squishe
          ? squishe(demo.traj, CompressionSpec::error(config.mu))
          : downsample(demo.traj, 20.0, config.downsample_hz);

  detail.record.missed_grasp = true;
  for (const auto& w : prior.waypoints) {
    if (w.contact && (w.pos - world.object_pos).norm() <= world.grasp_radius) {
      detail.record.missed_grasp = false;
      break;
    }
  }

  switch (config.noise) {
    case NoiseModel::none: break;
    case NoiseModel::gaussian:
      prior = gaussian_distort(prior, config.sigma, rng());
      break;
    case NoiseModel::tanh_field:
      prior = tanh_distort(prior, config.field);
      break;
  }
  prior = clamp_to(world.workspace, prior);
  detail.prior = prior;

  if (config.use_residual && residual != nullptr) {
    prior = clamp_to(world.workspace, correct(*residual, prior));
  }

  auto finish = [&](bool success, int grasp_rollouts, int task_rollouts) {
    detail.record.success = success;
    detail.record.grasp_rollouts = grasp_rollouts;
    detail.record.task_rollouts = task_rollouts;
    detail.record.rollouts_to_converge = grasp_rollouts + task_rollouts;
    detail.record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return detail;
  };

  const int n_all = static_cast<int>(prior.size());

  auto aligned_rewards_of = [&](const Trajectory& traj, const EpisodeResult& ep) {
    const ObjectTrack human =
        align_tracks(demo.object_track, demo.frame_times, traj.times());
    return waypoint_rewards(human, ep.object_track);
  };

  if (config.unified) {
    // whole-trajectory baseline: one joint surrogate proposes every
    // waypoint after the start and sees only the summed reward; there is
    // no dedicated grasp search
    Trajectory start_only;
    start_only.kind = TrajKind::solved;
    start_only.waypoints.push_back(prior[0]);
    const std::vector<Waypoint> joint_prior(prior.waypoints.begin() + 1,
                                            prior.waypoints.end());
    TaskEvalFn joint_eval = [&](const Trajectory& full) {
      const EpisodeResult ep = rollout(world, task, full);
      RewardSeries all = aligned_rewards_of(full, ep);
      return TaskEval{ep, RewardSeries::from_values(std::vector<double>(
                              all.values.end() - (n_all - 1), all.values.end()))};
    };
    TaskSearchOptions topt;
    topt.eps_task = task_box_half_width(config);
    topt.pixel_tol = pixel_tolerance(world);
    topt.budget = config.grasp_budget + config.task_budget;
    topt.seed = rng();
    topt.unified = true;
    topt.clip = world.workspace;
    const TaskSearchResult tres =
        task_search(start_only, joint_prior, joint_eval, topt);
    detail.solved = tres.best;
    return finish(tres.converged && tres.success, 0, tres.rollouts_used);
  }

  std::vector<Waypoint> object_at;
  object_at.reserve(prior.size());
  for (const auto& w : prior.waypoints) {
    object_at.push_back(Waypoint{
        lerp_track(demo.object_track_3d, demo.frame_times, w.t), w.contact, w.t});
  }

  SegmentedPrior seg;
  try {
    seg = segment_prior(prior, object_at);
  } catch (const ViewError&) {
    return finish(false, 0, 0);
  }
  const int gi = seg.grasp_index;
  const int n = static_cast<int>(prior.size());

  // anchor the region on the object where contact first begins in the
  // demonstration; a sparse prior's kept contact waypoint can land
  // mid-carry, where the tracked object is already off the table
  double onset_t = prior[gi].t;
  for (const auto& w : demo.traj.waypoints) {
    if (w.contact) {
      onset_t = w.t;
      break;
    }
  }
  const Vec3 grasp_anchor =
      lerp_track(demo.object_track_3d, demo.frame_times, onset_t);
  GraspSearchRegion region =
      build_region(prior[gi], grasp_anchor, config.delta, config.delta_min);
  region.box = region.box.intersect(world.workspace);

  GraspEvalFn grasp_eval = [&](const Vec3& cand) {
    Trajectory t;
    t.waypoints.assign(prior.waypoints.begin(), prior.waypoints.begin() + gi);
    Waypoint g = prior[gi];
    g.pos = cand;
    g.contact = true;
    t.waypoints.push_back(g);
    if (gi + 1 < n) t.waypoints.push_back(prior[gi + 1]);
    const EpisodeResult ep = rollout(world, task, t);
    return GraspEval{ep, aligned_rewards_of(t, ep)};
  };

  GraspSearchOptions gopt;
  gopt.policy = ExploitationPolicy{config.gamma, config.epsilon, config.alpha};
  gopt.m = config.m;
  gopt.k = config.k;
  gopt.budget = config.grasp_budget;
  gopt.seed = rng();
  const GraspSearchResult gres =
      grasp_search(region, prior[gi].pos, grasp_eval, gopt);
  if (!gres.grasped) return finish(false, gres.rollouts_used, 0);

  Trajectory prefix;
  prefix.kind = TrajKind::solved;
  prefix.waypoints.assign(prior.waypoints.begin(), prior.waypoints.begin() + gi);
  Waypoint g = prior[gi];
  g.pos = gres.grasp;
  g.contact = true;
  prefix.waypoints.push_back(g);

  const std::vector<Waypoint> task_prior(prior.waypoints.begin() + gi + 1,
                                         prior.waypoints.end());
  const int nt = static_cast<int>(task_prior.size());

  TaskEvalFn task_eval = [&](const Trajectory& full) {
    const EpisodeResult ep = rollout(world, task, full);
    RewardSeries all = aligned_rewards_of(full, ep);
    return TaskEval{ep, RewardSeries::from_values(std::vector<double>(
                            all.values.end() - nt, all.values.end()))};
  };

  TaskSearchOptions topt;
  topt.eps_task = task_box_half_width(config);
  topt.pixel_tol = pixel_tolerance(world);
  topt.budget = config.task_budget;
  topt.seed = rng();
  topt.unified = false;
  topt.clip = world.workspace;
  const TaskSearchResult tres = task_search(prefix, task_prior, task_eval, topt);

  detail.solved = tres.best;
  // a timeout counts as failure even when some rollout happened to succeed
  return finish(tres.converged && tres.success, gres.rollouts_used,
                tres.rollouts_used);
}

CellSummary summarize(const std::string& ablation, const std::string& cell,
                      const std::string& task,
                      const std::vector<TrialRecord>& records) {
  CellSummary out;
  out.ablation = ablation;
  out.cell = cell;
  out.task = task;
  out.trials = static_cast<int>(records.size());
  if (records.empty()) return out;
  const double n = static_cast<double>(records.size());
  double successes = 0.0;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.success) successes += 1.0;
    sum += r.rollouts_to_converge;
    if (r.missed_grasp) ++out.missed_grasp_count;
  }
  out.success_rate = successes / n;
  out.se_success = std::sqrt(out.success_rate * (1.0 - out.success_rate) / n);
  out.mean_rollouts = sum / n;
  double var = 0.0;
  for (const auto& r : records) {
    const double d = r.rollouts_to_converge - out.mean_rollouts;
    var += d * d;
  }
  var /= n;
  out.se_rollouts = std::sqrt(var / n);
  return out;
}

std::string results_csv(const std::vector<CellSummary>& rows) {
  std::string out =
      "ablation,cell,task,trials,success_rate,se_success,mean_rollouts,se_rollouts\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%.6f,%.6f,%.6f,%.6f\n",
                  r.ablation.c_str(), r.cell.c_str(), r.task.c_str(), r.trials,
                  r.success_rate, r.se_success, r.mean_rollouts, r.se_rollouts);
    out += buf;
  }
  return out;
}

namespace {

struct Cell {
  std::string name;
  RunConfig config;
};

BatchOutput run_cells(const std::string& ablation, const std::vector<Cell>& cells,
                      const ResidualModel* residual = nullptr) {
  BatchOutput out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const RunConfig& config = cells[c].config;
    std::vector<TrialRecord> records;
    records.reserve(config.trials);
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed =
          derive_seed(config.base_seed, ablation, static_cast<int>(c), trial);
      const ResidualModel* model = config.use_residual ? residual : nullptr;
      TrialDetail detail = run_view_trial(config, seed, model);
      records.push_back(detail.record);
      out.logs.push_back(TrialLog{ablation, cells[c].name, task_name(config.task),
                                  trial, detail.record});
    }
    out.summaries.push_back(
        summarize(ablation, cells[c].name, task_name(config.task), records));
  }
  return out;
}

std::string format_sigma(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sigma=%.2f", sigma);
  return buf;
}

}  // namespace

BatchOutput run_view(const RunConfig& config) {
  ResidualModel model;
  const ResidualModel* residual = nullptr;
  if (config.use_residual && !config.residual_path.empty()) {
    model = load_residual(config.residual_path);
    residual = &model;
  }
  return run_cells("run", {Cell{"default", config}}, residual);
}

BatchOutput ablate_noise(const RunConfig& base) {
  std::vector<Cell> cells;
  for (double sigma : {0.05, 0.10, 0.15, 0.20}) {
    for (TaskSpec::Kind kind :
         {TaskSpec::Kind::pick, TaskSpec::Kind::push, TaskSpec::Kind::move}) {
      RunConfig c = base;
      c.noise = NoiseModel::gaussian;
      c.sigma = sigma;
      c.task = kind;
      c.compression = CompressionKind::squishe;
      cells.push_back(Cell{format_sigma(sigma), c});
    }
  }
  return run_cells("noise", cells);
}

BatchOutput ablate_compression(const RunConfig& base) {
  std::vector<Cell> cells;
  auto make = [&](const std::string& name, CompressionKind kind, double hz) {
    RunConfig c = base;
    c.noise = NoiseModel::gaussian;
    c.sigma = 0.15;
    c.compression = kind;
    c.downsample_hz = hz;
    // denser cells need more task iterations; a larger cap keeps the
    // per-cell differences from being censored at the budget
    c.task_budget = 60;
    cells.push_back(Cell{name, c});
  };
  make("squishe", CompressionKind::squishe, 0.0);
  make("5hz", CompressionKind::downsample, 5.0);
  make("10hz", CompressionKind::downsample, 10.0);
  make("20hz", CompressionKind::downsample, 20.0);
  return run_cells("compression", cells);
}

BatchOutput ablate_exploration(const RunConfig& base) {
  std::vector<Cell> cells;
  for (bool unified : {false, true}) {
    for (TaskSpec::Kind kind :
         {TaskSpec::Kind::pick, TaskSpec::Kind::push, TaskSpec::Kind::move}) {
      RunConfig c = base;
      c.noise = NoiseModel::gaussian;
      c.sigma = 0.15;
      c.task = kind;
      c.unified = unified;
      cells.push_back(Cell{unified ? "unified" : "split", c});
    }
  }
  return run_cells("exploration", cells);
}

ResidualAblationOutput ablate_residual(const RunConfig& base) {
  ResidualAblationOutput out;

  // training phase: solve tanh-distorted tasks at sampled locations and
  // pool (prior, solved) waypoint pairs from the successes
  const TaskSpec::Kind kinds[] = {TaskSpec::Kind::pick, TaskSpec::Kind::push,
                                  TaskSpec::Kind::move};
  RunConfig train = base;
  train.noise = NoiseModel::tanh_field;
  train.randomize_object = true;
  train.use_residual = false;
  for (int i = 0; i < 50; ++i) {
    train.task = kinds[i % 3];
    const std::uint64_t seed = derive_seed(base.base_seed, "residual-train", 0, i);
    TrialDetail detail = run_view_trial(train, seed, nullptr);
    if (!detail.record.success) continue;
    // waypoint 0 is never optimized by the search, so it carries no
    // correction signal
    for (std::size_t w = 1; w < detail.prior.size(); ++w) {
      out.dataset.pairs.emplace_back(detail.prior[w].pos, detail.solved[w].pos);
    }
  }

  const SimWorld world = make_default_world(base.object_pos);
  TrainConfig tc;
  tc.seed = derive_seed(base.base_seed, "residual-fit", 0, 0);
  out.model = train_residual(out.dataset, world.workspace, tc);

  std::vector<Cell> cells;
  for (bool on : {false, true}) {
    for (TaskSpec::Kind kind : kinds) {
      RunConfig c = base;
      c.noise = NoiseModel::tanh_field;
      c.randomize_object = true;
      c.task = kind;
      c.use_residual = on;
      cells.push_back(Cell{on ? "residual" : "no-residual", c});
    }
  }
  out.batch = run_cells("residual", cells, &out.model);
  return out;
}

void write_outputs(const RunConfig& config, const std::string& ablation,
                   const BatchOutput& batch) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);

  std::ofstream csv(fs::path(config.out_dir) / "results.csv");
  csv << results_csv(batch.summaries);

  std::ofstream episodes(fs::path(config.out_dir) / "episodes.jsonl");
  for (const auto& log : batch.logs) {
    nlohmann::json row = {
        {"ablation", log.ablation},
        {"cell", log.cell},
        {"task", log.task},
        {"trial", log.trial},
        {"seed", log.record.seed},
        {"success", log.record.success},
        {"grasp_rollouts", log.record.grasp_rollouts},
        {"task_rollouts", log.record.task_rollouts},
        {"rollouts_to_converge", log.record.rollouts_to_converge},
        {"missed_grasp", log.record.missed_grasp},
        {"seconds", log.record.seconds}};
    episodes << row.dump() << "\n";
  }

  nlohmann::json doc = {
      {"ablation", ablation},
      {"task", task_name(config.task)},
      {"noise", noise_name(config.noise)},
      {"sigma", config.sigma},
      {"compression",
       config.compression == CompressionKind::squishe ? "squishe" : "downsample"},
      {"mu", config.mu},
      {"downsample_hz", config.downsample_hz},
      {"m", config.m},
      {"k", config.k},
      {"gamma", config.gamma},
      {"epsilon", config.epsilon},
      {"alpha", config.alpha},
      {"delta", config.delta},
      {"delta_min", config.delta_min},
      {"grasp_budget", config.grasp_budget},
      {"task_budget", config.task_budget},
      {"eps_task", task_box_half_width(config)},
      {"unified", config.unified},
      {"use_residual", config.use_residual},
      {"residual_path", config.residual_path},
      {"trials", config.trials},
      {"base_seed", config.base_seed},
      {"object_pos", {config.object_pos.x(), config.object_pos.y(),
                      config.object_pos.z()}},
      {"randomize_object", config.randomize_object}};
  std::ofstream cfg(fs::path(config.out_dir) / "config.json");
  cfg << doc.dump(2) << "\n";
}

IngestedPrior ingest_recording(const std::string& path, const CompressionSpec& spec) {
  const Recording rec = load_recording(path);
  IngestedPrior out;
  out.hand = debounce_contacts(extract_hand_trajectory(rec.frames, rec.camera));
  out.object_tag = vote_object_tag(rec.frames);
  ObjectExtraction obj = extract_object_track(rec.frames, out.object_tag, rec.camera);
  out.object_track = std::move(obj.track);
  out.object_track_3d = std::move(obj.track_3d);
  out.compressed = squishe(out.hand, spec);
  return out;
}

}  // namespace view
