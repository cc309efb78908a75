#include <doctest.h>

#include <cstdio>
#include <random>

#include "view/residual.hpp"

using namespace view;

namespace {

double sample_loss(const Mlp& net, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& target) {
  return (net.forward(x) - target).squaredNorm();
}

ResidualDataset shift_dataset(int n, const Vec3& shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  ResidualDataset out;
  for (int i = 0; i < n; ++i) {
    const Vec3 prior{u(rng), u(rng), 0.5 * u(rng)};
    out.pairs.emplace_back(prior, prior + shift);
  }
  return out;
}

}  // namespace

TEST_CASE("backpropagated gradients match finite differences") {
  std::mt19937_64 rng(7);
  Mlp net = Mlp::make(3, 8, 3, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& b : net.biases) {
    for (int i = 0; i < b.size(); ++i) b[i] = 0.1 * gauss(rng);
  }
  Eigen::VectorXd x(3), target(3);
  for (int k = 0; k < 3; ++k) {
    x[k] = gauss(rng);
    target[k] = gauss(rng);
  }

  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  for (int l = 0; l < 3; ++l) {
    gw.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    gb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  net.backward(x, target, gw, gb);

  const double h = 1e-6;
  std::uniform_int_distribution<int> layer_pick(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const int l = layer_pick(rng);
    auto& w = net.weights[l];
    std::uniform_int_distribution<int> rpick(0, static_cast<int>(w.rows()) - 1);
    std::uniform_int_distribution<int> cpick(0, static_cast<int>(w.cols()) - 1);
    const int r = rpick(rng);
    const int c = cpick(rng);
    const double keep = w(r, c);
    w(r, c) = keep + h;
    const double up = sample_loss(net, x, target);
    w(r, c) = keep - h;
    const double down = sample_loss(net, x, target);
    w(r, c) = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = gw[l](r, c);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    CHECK(std::abs(numeric - analytic) / scale < 1e-4);
  }
  for (int l = 0; l < 3; ++l) {
    auto& b = net.biases[l];
    for (int i = 0; i < std::min<int>(3, static_cast<int>(b.size())); ++i) {
      const double keep = b[i];
      b[i] = keep + h;
      const double up = sample_loss(net, x, target);
      b[i] = keep - h;
      const double down = sample_loss(net, x, target);
      b[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(numeric), std::abs(gb[l][i]), 1e-6});
      CHECK(std::abs(numeric - gb[l][i]) / scale < 1e-4);
    }
  }
}

TEST_CASE("training learns a constant workspace shift") {
  const Box box{Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 1.0, 0.5}};
  const Vec3 shift{0.04, -0.03, 0.02};
  const ResidualDataset data = shift_dataset(120, shift, 11);

  TrainConfig cfg;
  cfg.seed = 11;
  const ResidualModel model = train_residual(data, box, cfg);
  const double loss = residual_loss(model, data);
  CHECK(loss < 1e-3);

  const Vec3 probe{0.45, 0.55, 0.22};
  CHECK((model.predict(probe) - (probe + shift)).norm() < 0.02);
  CHECK((model.correction(probe) - shift).norm() < 0.02);
}

TEST_CASE("an empty dataset is rejected") {
  CHECK_THROWS_AS(train_residual(ResidualDataset{}, Box{Vec3::Zero(), Vec3::Ones()}),
                  EmptyDatasetError);
}

TEST_CASE("correction preserves contacts and timestamps") {
  const Box box{Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 1.0, 0.5}};
  const ResidualDataset data = shift_dataset(80, Vec3{0.03, 0.0, 0.0}, 3);
  const ResidualModel model = train_residual(data, box, TrainConfig{.seed = 3});

  Trajectory traj;
  traj.waypoints.push_back(Waypoint{Vec3{0.3, 0.3, 0.1}, false, 0.0});
  traj.waypoints.push_back(Waypoint{Vec3{0.5, 0.4, 0.2}, true, 1.0});
  const Trajectory out = correct(model, traj);
  REQUIRE(out.size() == traj.size());
  CHECK(out.kind == TrajKind::corrected);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(out[i].contact == traj[i].contact);
    CHECK(out[i].t == traj[i].t);
    CHECK((out[i].pos - model.predict(traj[i].pos)).norm() == 0.0);
  }
}

TEST_CASE("models and datasets survive save and load round trips") {
  const Box box{Vec3{0.1, 0.0, 0.0}, Vec3{0.9, 1.0, 0.4}};
  const ResidualDataset data = shift_dataset(20, Vec3{0.02, 0.01, -0.01}, 29);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 29;
  const ResidualModel model = train_residual(data, box, cfg);

  const std::string mpath = "/tmp/view_test_residual.json";
  save_residual(model, mpath);
  const ResidualModel back = load_residual(mpath);
  std::remove(mpath.c_str());
  CHECK((back.norm_box.lo - box.lo).norm() == 0.0);
  CHECK((back.norm_box.hi - box.hi).norm() == 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 10; ++i) {
    const Vec3 p{u(rng), u(rng), 0.4 * u(rng)};
    CHECK((back.predict(p) - model.predict(p)).norm() < 1e-12);
  }

  const std::string dpath = "/tmp/view_test_dataset.jsonl";
  save_dataset(data, dpath);
  const ResidualDataset dback = load_dataset(dpath);
  std::remove(dpath.c_str());
  REQUIRE(dback.pairs.size() == data.pairs.size());
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    CHECK((dback.pairs[i].first - data.pairs[i].first).norm() < 1e-15);
    CHECK((dback.pairs[i].second - data.pairs[i].second).norm() < 1e-15);
  }
}
