#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "view/pipeline.hpp"

namespace {

view::TaskSpec::Kind parse_task(const std::string& name) {
  if (name == "pick") return view::TaskSpec::Kind::pick;
  if (name == "push") return view::TaskSpec::Kind::push;
  if (name == "move") return view::TaskSpec::Kind::move;
  throw CLI::ValidationError("task must be pick, push, or move");
}

view::NoiseModel parse_noise(const std::string& name) {
  if (name == "none") return view::NoiseModel::none;
  if (name == "gaussian") return view::NoiseModel::gaussian;
  if (name == "tanh") return view::NoiseModel::tanh_field;
  throw CLI::ValidationError("noise must be none, gaussian, or tanh");
}

// Fills config from a JSON file, but only for keys whose CLI flag was
// not passed explicitly (flags override file values).
void apply_config_file(view::RunConfig& config, std::string& task,
                       std::string& noise, const std::string& path,
                       const CLI::App* active) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  auto overridden = [&](const char* flag) {
    if (flag[0] == '\0') return false;
    const CLI::Option* opt =
        const_cast<CLI::App*>(active)->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  auto get = [&](const char* key, const char* flag, auto& slot) {
    if (doc.contains(key) && !overridden(flag)) {
      slot = doc.at(key).get<std::decay_t<decltype(slot)>>();
    }
  };
  get("task", "--task", task);
  get("noise", "--noise", noise);
  get("sigma", "--sigma", config.sigma);
  get("mu", "--mu", config.mu);
  get("downsample_hz", "", config.downsample_hz);
  if (doc.contains("compression")) {
    config.compression = doc.at("compression").get<std::string>() == "downsample"
                             ? view::CompressionKind::downsample
                             : view::CompressionKind::squishe;
  }
  get("m", "", config.m);
  get("k", "", config.k);
  get("gamma", "", config.gamma);
  get("epsilon", "", config.epsilon);
  get("alpha", "", config.alpha);
  get("delta", "", config.delta);
  get("delta_min", "", config.delta_min);
  get("grasp_budget", "--grasp-budget", config.grasp_budget);
  get("task_budget", "--task-budget", config.task_budget);
  get("eps_task", "--eps-task", config.eps_task);
  get("unified", "--unified", config.unified);
  get("use_residual", "--residual", config.use_residual);
  get("residual_path", "--residual-path", config.residual_path);
  get("trials", "--trials", config.trials);
  get("base_seed", "--seed", config.base_seed);
  get("out", "--out", config.out_dir);
  get("randomize_object", "", config.randomize_object);
  if (doc.contains("object_pos")) {
    for (int i = 0; i < 3; ++i) {
      config.object_pos[i] = doc.at("object_pos").at(i).get<double>();
    }
  }
}

void print_summaries(const view::BatchOutput& batch) {
  std::cout << view::results_csv(batch.summaries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waypoint-based visual imitation pipeline"};
  app.require_subcommand(1);

  view::RunConfig config;
  std::string task = "pick";
  std::string noise = "gaussian";
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override)");
    cmd->add_option("--task", task, "pick, push, or move");
    cmd->add_option("--noise", noise, "none, gaussian, or tanh");
    cmd->add_option("--sigma", config.sigma, "gaussian noise std (m)");
    cmd->add_option("--mu", config.mu, "compression max SED (m)");
    cmd->add_option("--trials", config.trials, "trials per cell");
    cmd->add_option("--seed", config.base_seed, "base seed");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_option("--grasp-budget", config.grasp_budget, "grasp rollout budget");
    cmd->add_option("--task-budget", config.task_budget, "task rollout budget");
    cmd->add_option("--eps-task", config.eps_task,
                    "task box half-width (0 = derive from noise)");
    cmd->add_option("--residual-path", config.residual_path,
                    "trained corrector checkpoint");
    cmd->add_flag("--residual", config.use_residual, "apply the corrector");
    cmd->add_flag("--unified", config.unified, "joint whole-trajectory optimizer");
  };

  auto* ingest = app.add_subcommand("ingest", "extract a prior from a recording");
  std::string recording_path;
  ingest->add_option("recording", recording_path, "recording JSON file")->required();
  ingest->add_option("--mu", config.mu, "compression max SED (m)");

  auto* compress = app.add_subcommand("compress", "compress a recording's prior");
  compress->add_option("recording", recording_path, "recording JSON file")->required();
  compress->add_option("--mu", config.mu, "compression max SED (m)");

  auto* run = app.add_subcommand("run", "run seeded trials of one configuration");
  add_common(run);
  auto* abl_noise = app.add_subcommand("ablate-noise", "gaussian noise sweep");
  add_common(abl_noise);
  auto* abl_comp = app.add_subcommand("ablate-compression",
                                      "compression vs fixed-rate downsampling");
  add_common(abl_comp);
  auto* abl_expl = app.add_subcommand("ablate-exploration",
                                      "split vs unified waypoint search");
  add_common(abl_expl);
  auto* abl_res = app.add_subcommand("ablate-residual",
                                     "corrector on held-out object locations");
  add_common(abl_res);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      apply_config_file(config, task, noise, config_path,
                        app.get_subcommands().front());
    }
    config.task = parse_task(task);
    config.noise = parse_noise(noise);

    if (ingest->parsed() || compress->parsed()) {
      const view::IngestedPrior prior = view::ingest_recording(
          recording_path, view::CompressionSpec::error(config.mu));
      nlohmann::json doc;
      doc["object_tag"] = prior.object_tag;
      doc["raw_waypoints"] = prior.hand.size();
      doc["compressed_waypoints"] = prior.compressed.size();
      doc["waypoints"] = nlohmann::json::array();
      for (const auto& w : prior.compressed.waypoints) {
        doc["waypoints"].push_back({{"pos", {w.pos.x(), w.pos.y(), w.pos.z()}},
                                    {"contact", w.contact},
                                    {"t", w.t}});
      }
      std::cout << doc.dump(2) << "\n";
      return 0;
    }

    view::BatchOutput batch;
    std::string ablation;
    if (run->parsed()) {
      ablation = "run";
      batch = view::run_view(config);
    } else if (abl_noise->parsed()) {
      ablation = "noise";
      batch = view::ablate_noise(config);
    } else if (abl_comp->parsed()) {
      ablation = "compression";
      batch = view::ablate_compression(config);
    } else if (abl_expl->parsed()) {
      ablation = "exploration";
      batch = view::ablate_exploration(config);
    } else if (abl_res->parsed()) {
      ablation = "residual";
      view::ResidualAblationOutput out = view::ablate_residual(config);
      batch = std::move(out.batch);
      std::filesystem::create_directories(config.out_dir);
      view::save_residual(out.model,
                          (std::filesystem::path(config.out_dir) / "residual.json")
                              .string());
      view::save_dataset(out.dataset,
                         (std::filesystem::path(config.out_dir) / "pairs.jsonl")
                             .string());
    }
    view::write_outputs(config, ablation, batch);
    print_summaries(batch);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
