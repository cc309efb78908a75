#include "view/residual.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace view {

Mlp Mlp::make(int in, int hidden, int out, std::mt19937_64& rng) {
  Mlp net;
  const int dims[] = {in, hidden, hidden, out};
  for (int layer = 0; layer < 3; ++layer) {
    const int rows = dims[layer + 1];
    const int cols = dims[layer];
    // He-style scaling for the rectified hidden layers
    std::normal_distribution<double> init(0.0, std::sqrt(2.0 / cols));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) w(r, c) = init(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(rows));
  }
  return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = (weights[0] * x + biases[0]).cwiseMax(0.0);
  h = (weights[1] * h + biases[1]).cwiseMax(0.0);
  return weights[2] * h + biases[2];
}

void Mlp::backward(const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                   std::vector<Eigen::MatrixXd>& grad_w,
                   std::vector<Eigen::VectorXd>& grad_b) const {
  const Eigen::VectorXd z1 = weights[0] * x + biases[0];
  const Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  const Eigen::VectorXd z2 = weights[1] * a1 + biases[1];
  const Eigen::VectorXd a2 = z2.cwiseMax(0.0);
  const Eigen::VectorXd out = weights[2] * a2 + biases[2];

  // d/dout of ||out - target||^2
  Eigen::VectorXd delta = 2.0 * (out - target);
  grad_w[2] += delta * a2.transpose();
  grad_b[2] += delta;
  delta = (weights[2].transpose() * delta).array() *
          (z2.array() > 0.0).cast<double>();
  grad_w[1] += delta * a1.transpose();
  grad_b[1] += delta;
  delta = (weights[1].transpose() * delta).array() *
          (z1.array() > 0.0).cast<double>();
  grad_w[0] += delta * x.transpose();
  grad_b[0] += delta;
}

namespace {

Eigen::VectorXd normalize(const Box& box, const Vec3& p) {
  Eigen::VectorXd out(3);
  for (int k = 0; k < 3; ++k) {
    const double span = std::max(box.hi[k] - box.lo[k], 1e-9);
    out[k] = (p[k] - box.lo[k]) / span;
  }
  return out;
}

Vec3 denormalize(const Box& box, const Eigen::VectorXd& p) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    const double span = std::max(box.hi[k] - box.lo[k], 1e-9);
    out[k] = box.lo[k] + p[k] * span;
  }
  return out;
}

}  // namespace

Vec3 ResidualModel::predict(const Vec3& prior) const {
  return denormalize(norm_box, net.forward(normalize(norm_box, prior)));
}

ResidualModel train_residual(const ResidualDataset& dataset, const Box& norm_box,
                             const TrainConfig& config) {
  if (dataset.pairs.empty()) throw EmptyDatasetError("no training pairs");
  std::mt19937_64 rng(config.seed);

  ResidualModel model;
  model.norm_box = norm_box;
  model.net = Mlp::make(3, config.hidden, 3, rng);

  const int n = static_cast<int>(dataset.pairs.size());
  std::vector<Eigen::VectorXd> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = normalize(norm_box, dataset.pairs[i].first);
    ys[i] = normalize(norm_box, dataset.pairs[i].second);
  }

  // Adam state
  std::vector<Eigen::MatrixXd> mw, vw, gw;
  std::vector<Eigen::VectorXd> mb, vb, gb;
  for (int l = 0; l < 3; ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(model.net.weights[l].rows(),
                                       model.net.weights[l].cols()));
    vw.push_back(mw.back());
    gw.push_back(mw.back());
    mb.push_back(Eigen::VectorXd::Zero(model.net.biases[l].size()));
    vb.push_back(mb.back());
    gb.push_back(mb.back());
  }
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double lr = config.lr;
  long step = 0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch == (config.epochs * 2) / 5 || epoch == (config.epochs * 4) / 5) {
      lr *= config.decay;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.batch) {
      const int end = std::min(start + config.batch, n);
      for (int l = 0; l < 3; ++l) {
        gw[l].setZero();
        gb[l].setZero();
      }
      for (int s = start; s < end; ++s) {
        model.net.backward(xs[order[s]], ys[order[s]], gw, gb);
      }
      const double scale = 1.0 / (end - start);
      ++step;
      const double bc1 = 1.0 - std::pow(beta1, step);
      const double bc2 = 1.0 - std::pow(beta2, step);
      for (int l = 0; l < 3; ++l) {
        const Eigen::MatrixXd g = gw[l] * scale;
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * g;
        vw[l] = beta2 * vw[l].array() + (1.0 - beta2) * g.array().square();
        model.net.weights[l].array() -=
            lr * (mw[l].array() / bc1) /
            ((vw[l].array() / bc2).sqrt() + eps);
        const Eigen::VectorXd gv = gb[l] * scale;
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * gv;
        vb[l] = beta2 * vb[l].array() + (1.0 - beta2) * gv.array().square();
        model.net.biases[l].array() -=
            lr * (mb[l].array() / bc1) /
            ((vb[l].array() / bc2).sqrt() + eps);
      }
    }
  }
  for (const auto& w : model.net.weights) {
    if (!w.allFinite()) throw ViewError("training diverged");
  }
  return model;
}

double residual_loss(const ResidualModel& model, const ResidualDataset& dataset) {
  if (dataset.pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [prior, solved] : dataset.pairs) {
    sum += (model.predict(prior) - solved).squaredNorm();
  }
  return sum / dataset.pairs.size();
}

Trajectory correct(const ResidualModel& model, const Trajectory& traj) {
  Trajectory out = traj;
  out.kind = TrajKind::corrected;
  for (auto& w : out.waypoints) w.pos = model.predict(w.pos);
  return out;
}

void save_residual(const ResidualModel& model, const std::string& path) {
  nlohmann::json doc;
  doc["norm_box"] = {{"lo", {model.norm_box.lo.x(), model.norm_box.lo.y(),
                             model.norm_box.lo.z()}},
                     {"hi", {model.norm_box.hi.x(), model.norm_box.hi.y(),
                             model.norm_box.hi.z()}}};
  doc["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
    const auto& w = model.net.weights[l];
    std::vector<double> flat(w.size());
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) flat[r * w.cols() + c] = w(r, c);
    }
    const auto& b = model.net.biases[l];
    doc["layers"].push_back(
        {{"rows", w.rows()},
         {"cols", w.cols()},
         {"weights", flat},
         {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  std::ofstream out(path);
  if (!out) throw ViewError("cannot write checkpoint: " + path);
  out << doc.dump() << "\n";
}

ResidualModel load_residual(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ViewError("cannot open checkpoint: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  ResidualModel model;
  const auto& box = doc.at("norm_box");
  for (int k = 0; k < 3; ++k) {
    model.norm_box.lo[k] = box.at("lo").at(k).get<double>();
    model.norm_box.hi[k] = box.at("hi").at(k).get<double>();
  }
  for (const auto& layer : doc.at("layers")) {
    const int rows = layer.at("rows").get<int>();
    const int cols = layer.at("cols").get<int>();
    const auto flat = layer.at("weights").get<std::vector<double>>();
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) w(r, c) = flat[r * cols + c];
    }
    model.net.weights.push_back(std::move(w));
    const auto bias = layer.at("bias").get<std::vector<double>>();
    model.net.biases.push_back(
        Eigen::Map<const Eigen::VectorXd>(bias.data(), bias.size()));
  }
  return model;
}

void save_dataset(const ResidualDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ViewError("cannot write dataset: " + path);
  for (const auto& [prior, solved] : dataset.pairs) {
    nlohmann::json row = {{"prior", {prior.x(), prior.y(), prior.z()}},
                          {"solved", {solved.x(), solved.y(), solved.z()}}};
    out << row.dump() << "\n";
  }
}

ResidualDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ViewError("cannot open dataset: " + path);
  ResidualDataset dataset;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line);
    Vec3 prior, solved;
    for (int k = 0; k < 3; ++k) {
      prior[k] = row.at("prior").at(k).get<double>();
      solved[k] = row.at("solved").at(k).get<double>();
    }
    dataset.pairs.emplace_back(prior, solved);
  }
  return dataset;
}

}  // namespace view
