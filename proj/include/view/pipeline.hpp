#pragma once

#include <optional>

#include "view/compress.hpp"
#include "view/core.hpp"
#include "view/explore_grasp.hpp"
#include "view/explore_task.hpp"
#include "view/ingest.hpp"
#include "view/residual.hpp"
#include "view/reward.hpp"
#include "view/sim.hpp"

namespace view {

enum class NoiseModel { none, gaussian, tanh_field };
enum class CompressionKind { squishe, downsample };

const char* noise_name(NoiseModel model);

struct RunConfig {
  TaskSpec::Kind task{TaskSpec::Kind::pick};
  NoiseModel noise{NoiseModel::gaussian};
  double sigma{0.15};
  TanhNoiseField field;
  CompressionKind compression{CompressionKind::squishe};
  double mu{0.01};              // SQUISHE max SED (m)
  double downsample_hz{5.0};

  int m{30};
  int k{3};
  double gamma{5.0};
  double epsilon{0.04};
  double alpha{0.3};
  double delta{0.1};
  double delta_min{0.05};
  int grasp_budget{60};
  int task_budget{40};
  double eps_task{0.0};         // 0 = derive from the noise model
  bool unified{false};

  bool use_residual{false};
  std::string residual_path;

  int trials{50};
  std::uint64_t base_seed{1};
  std::string out_dir{"out"};
  Vec3 object_pos{0.62, 0.55, 0.03};
  bool randomize_object{false};
};

struct TrialRecord {
  std::uint64_t seed{0};
  bool success{false};
  int grasp_rollouts{0};
  int task_rollouts{0};
  int rollouts_to_converge{0};
  double seconds{0.0};
  bool missed_grasp{false};     // compressed prior has no graspable contact waypoint
};

/// FNV-1a over the base seed and the trial coordinates; decorrelates
/// trials while keeping every run reproducible.
std::uint64_t derive_seed(std::uint64_t base, const std::string& ablation,
                          int cell, int trial);

/// Half-width of the per-waypoint task search boxes for a noise model.
double task_box_half_width(const RunConfig& config);

struct TrialDetail {
  TrialRecord record;
  Trajectory prior;             // post-compression, post-distortion
  Trajectory solved;            // valid when success
};

/// One full extract-compress-distort-search episode in the simulator.
TrialDetail run_view_trial(const RunConfig& config, std::uint64_t seed,
                           const ResidualModel* residual = nullptr);

struct CellSummary {
  std::string ablation;
  std::string cell;
  std::string task;
  int trials{0};
  double success_rate{0.0};
  double se_success{0.0};
  double mean_rollouts{0.0};
  double se_rollouts{0.0};
  int missed_grasp_count{0};
};

CellSummary summarize(const std::string& ablation, const std::string& cell,
                      const std::string& task,
                      const std::vector<TrialRecord>& records);

std::string results_csv(const std::vector<CellSummary>& rows);

struct TrialLog {
  std::string ablation;
  std::string cell;
  std::string task;
  int trial{0};
  TrialRecord record;
};

struct BatchOutput {
  std::vector<CellSummary> summaries;
  std::vector<TrialLog> logs;
};

/// Runs config.trials seeded trials of one configuration.
BatchOutput run_view(const RunConfig& config);

BatchOutput ablate_noise(const RunConfig& base);
BatchOutput ablate_compression(const RunConfig& base);
BatchOutput ablate_exploration(const RunConfig& base);

struct ResidualAblationOutput {
  BatchOutput batch;
  ResidualModel model;
  ResidualDataset dataset;
};

/// Trains the corrector on solved tanh-distorted tasks at sampled object
/// locations, then evaluates fresh locations with and without it.
ResidualAblationOutput ablate_residual(const RunConfig& base);

/// Writes results.csv, episodes.jsonl, and config.json under out_dir.
void write_outputs(const RunConfig& config, const std::string& ablation,
                   const BatchOutput& batch);

/// Builds a prior from a recorded demonstration instead of a scripted one.
struct IngestedPrior {
  Trajectory hand;              // raw extracted hand trajectory
  Trajectory compressed;
  std::string object_tag;
  ObjectTrack object_track;
  std::vector<Waypoint> object_track_3d;
};

IngestedPrior ingest_recording(const std::string& path, const CompressionSpec& spec);

}  // namespace view
