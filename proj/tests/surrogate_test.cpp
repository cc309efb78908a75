#include <doctest.h>

#include <random>

#include "view/surrogate.hpp"

using namespace view;

namespace {

Bounds cube(double lo, double hi, int dim = 3) {
  Bounds b;
  b.lo = Eigen::VectorXd::Constant(dim, lo);
  b.hi = Eigen::VectorXd::Constant(dim, hi);
  return b;
}

}  // namespace

TEST_CASE("posterior agrees with a direct kernel solve") {
  const Bounds b = cube(0.0, 1.0);
  GpConfig cfg;
  GpOptimizer opt(b, 5, cfg);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> xs;
  std::vector<double> ys;
  for (int i = 0; i < 4; ++i) {  // below the refit threshold
    Point p(3);
    for (int k = 0; k < 3; ++k) p[k] = unit(rng);
    const double y = std::sin(3.0 * p[0]) + p[1] * p[2];
    opt.tell(p, y);
    xs.push_back(p);
    ys.push_back(y);
  }

  const int n = static_cast<int>(xs.size());
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= n;
  double var = 0.0;
  for (double y : ys) var += (y - mean) * (y - mean);
  const double sd = std::max(std::sqrt(var / n), 1e-12);
  const double ell = opt.length_scale();

  auto kfn = [&](const Point& a, const Point& c) {
    return cfg.signal_variance *
           std::exp(-0.5 * (a - c).squaredNorm() / (ell * ell));
  };
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) gram(i, j) = kfn(xs[i], xs[j]);
    gram(i, i) += cfg.noise_variance + cfg.jitter;
  }
  Eigen::VectorXd ynorm(n);
  for (int i = 0; i < n; ++i) ynorm[i] = (ys[i] - mean) / sd;
  const Eigen::MatrixXd ginv = gram.inverse();

  std::uniform_real_distribution<double> probe(0.1, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    Point q(3);
    for (int k = 0; k < 3; ++k) q[k] = probe(rng);
    Eigen::VectorXd ks(n);
    for (int i = 0; i < n; ++i) ks[i] = kfn(q, xs[i]);
    const double expect_mean = mean + sd * ks.dot(ginv * ynorm);
    const double expect_var =
        sd * sd * std::max(kfn(q, q) - ks.dot(ginv * ks), 0.0);
    const auto [got_mean, got_var] = opt.predict(q);
    CHECK(std::abs(got_mean - expect_mean) < 1e-8);
    CHECK(std::abs(got_var - expect_var) < 1e-8);
  }
}

TEST_CASE("expected improvement matches its closed form") {
  GpOptimizer opt(cube(0.0, 1.0, 1), 9);
  opt.tell(Eigen::VectorXd::Constant(1, 0.2), 1.0);
  opt.tell(Eigen::VectorXd::Constant(1, 0.8), 3.0);

  const Point q = Eigen::VectorXd::Constant(1, 0.55);
  const auto [mean, var] = opt.predict(q);
  const double sd = std::sqrt(var);
  const double best = 3.0;
  const double z = (mean - best) / sd;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double expect = (mean - best) * Phi + sd * phi;
  CHECK(opt.expected_improvement(q) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("the optimizer interpolates noise-free observations") {
  GpOptimizer opt(cube(-1.0, 1.0), 23);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point> xs;
  std::vector<double> ys;
  for (int i = 0; i < 12; ++i) {
    Point p(3);
    for (int k = 0; k < 3; ++k) p[k] = unit(rng);
    const double y = p.squaredNorm();
    opt.tell(p, y);
    xs.push_back(p);
    ys.push_back(y);
  }
  for (int i = 0; i < 12; ++i) {
    const auto [mean, var] = opt.predict(xs[i]);
    CHECK(std::abs(mean - ys[i]) < 1e-4);
  }
}

TEST_CASE("proposals respect bounds and sub-boxes") {
  const Bounds b = cube(0.0, 1.0);
  GpOptimizer opt(b, 41);
  CHECK(b.contains(opt.ask()));
  opt.tell(Eigen::VectorXd::Constant(3, 0.5), 1.0);
  for (int i = 0; i < 10; ++i) CHECK(b.contains(opt.ask()));

  Bounds sub = cube(0.4, 0.6);
  for (int i = 0; i < 10; ++i) CHECK(sub.contains(opt.ask_in(sub)));

  // sub-boxes reaching past the bounds are clipped, not rejected
  Bounds wide = cube(0.9, 1.5);
  for (int i = 0; i < 10; ++i) {
    const Point p = opt.ask_in(wide);
    CHECK(b.contains(p));
    CHECK(p.minCoeff() >= 0.9);
  }
}

TEST_CASE("observations outside the bounds are rejected") {
  GpOptimizer opt(cube(0.0, 1.0), 1);
  CHECK_THROWS_AS(opt.tell(Eigen::VectorXd::Constant(3, 1.5), 0.0), OutOfBoundsError);
  RandomSearchOptimizer rnd(cube(0.0, 1.0), 1);
  CHECK_THROWS_AS(rnd.tell(Eigen::VectorXd::Constant(3, -0.5), 0.0), OutOfBoundsError);
}

TEST_CASE("identical seeds give identical proposal streams") {
  auto run = [](std::uint64_t seed) {
    GpOptimizer opt(cube(0.0, 1.0), seed);
    std::vector<Point> out;
    for (int i = 0; i < 5; ++i) {
      Point p = opt.ask();
      opt.tell(p, -p.squaredNorm());
      out.push_back(p);
    }
    return out;
  };
  const auto a = run(77);
  const auto b = run(77);
  const auto c = run(78);
  for (int i = 0; i < 5; ++i) CHECK((a[i] - b[i]).norm() == 0.0);
  bool differs = false;
  for (int i = 0; i < 5; ++i) differs = differs || (a[i] - c[i]).norm() > 0.0;
  CHECK(differs);
}

TEST_CASE("random search stays in bounds and is seed-deterministic") {
  const Bounds b = cube(-2.0, 3.0);
  RandomSearchOptimizer r1(b, 4);
  RandomSearchOptimizer r2(b, 4);
  for (int i = 0; i < 20; ++i) {
    const Point p = r1.ask();
    CHECK(b.contains(p));
    CHECK((p - r2.ask()).norm() == 0.0);
  }
}
