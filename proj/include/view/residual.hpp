#pragma once

#include "view/types.hpp"

namespace view {

/// Waypoint correction pairs pooled across solved tasks: the extracted
/// prior position and the position the search converged to.
struct ResidualDataset {
  std::vector<std::pair<Vec3, Vec3>> pairs;  // (prior, solved)
};

/// 3-64-64-3 fully connected network with rectified-linear hidden
/// layers. Inputs and outputs are normalized to the workspace box; the
/// network predicts the corrected waypoint directly.
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Mlp make(int in, int hidden, int out, std::mt19937_64& rng);
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  /// Accumulates squared-error gradients for one sample into grads.
  void backward(const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                std::vector<Eigen::MatrixXd>& grad_w,
                std::vector<Eigen::VectorXd>& grad_b) const;
};

struct ResidualModel {
  Mlp net;
  Box norm_box{Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 1.0, 0.5}};

  Vec3 predict(const Vec3& prior) const;
  Vec3 correction(const Vec3& prior) const { return predict(prior) - prior; }
};

struct TrainConfig {
  int epochs{100};
  double lr{0.1};
  double decay{0.15};       // applied at 40% and 80% of epochs
  int batch{32};
  int hidden{64};
  std::uint64_t seed{0};
};

ResidualModel train_residual(const ResidualDataset& dataset, const Box& norm_box,
                             const TrainConfig& config = {});

/// Mean squared error of the model's predictions over the dataset.
double residual_loss(const ResidualModel& model, const ResidualDataset& dataset);

/// Replaces every waypoint position with the model's prediction;
/// contact flags and timestamps pass through.
Trajectory correct(const ResidualModel& model, const Trajectory& traj);

void save_residual(const ResidualModel& model, const std::string& path);
ResidualModel load_residual(const std::string& path);

void save_dataset(const ResidualDataset& dataset, const std::string& path);
ResidualDataset load_dataset(const std::string& path);

}  // namespace view
