#pragma once

#include <memory>

#include "view/types.hpp"

namespace view {

using Point = Eigen::VectorXd;

/// Rectangular search bounds of arbitrary dimension.
struct Bounds {
  Point lo;
  Point hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& p, double slack = 1e-9) const;
  double diagonal() const { return (hi - lo).norm(); }

  static Bounds from_box(const Box& box);
};

/// Ask/tell interface shared by the low-level grasp search and the task
/// search. ask() proposes a point within bounds; tell() records one
/// observation of the objective (to be maximized).
class AskTellOptimizer {
public:
  virtual ~AskTellOptimizer() = default;

  virtual Point ask() = 0;
  /// Like ask() but samples candidates from a sub-box of the bounds.
  virtual Point ask_in(const Bounds& sub) = 0;
  virtual void tell(const Point& p, double value) = 0;

  virtual const std::vector<std::pair<Point, double>>& history() const = 0;
  virtual const Bounds& bounds() const = 0;
};

struct GpConfig {
  double signal_variance{1.0};
  double noise_variance{1e-8};   // sim rewards are deterministic
  double jitter{1e-9};
  int ei_candidates{1024};
  int refit_every{5};
  double length_scale_frac{0.2};  // initial ell as fraction of the diagonal
};

/// Squared-exponential GP with expected-improvement acquisition.
/// EI is maximized over seeded uniform candidates; hyperparameters are
/// refit over a small grid of length scales by marginal likelihood.
class GpOptimizer : public AskTellOptimizer {
public:
  GpOptimizer(Bounds bounds, std::uint64_t seed, GpConfig config = {});
  ~GpOptimizer() override;

  Point ask() override;
  Point ask_in(const Bounds& sub) override;
  void tell(const Point& p, double value) override;

  const std::vector<std::pair<Point, double>>& history() const override;
  const Bounds& bounds() const override;

  /// Posterior at a point (for diagnostics and tests).
  std::pair<double, double> predict(const Point& p) const;  // mean, variance
  double expected_improvement(const Point& p) const;
  double length_scale() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Uniform random proposals; fallback and ablation control.
class RandomSearchOptimizer : public AskTellOptimizer {
public:
  RandomSearchOptimizer(Bounds bounds, std::uint64_t seed);

  Point ask() override;
  Point ask_in(const Bounds& sub) override;
  void tell(const Point& p, double value) override;

  const std::vector<std::pair<Point, double>>& history() const override;
  const Bounds& bounds() const override;

private:
  Bounds bounds_;
  std::mt19937_64 rng_;
  std::vector<std::pair<Point, double>> history_;
};

}  // namespace view
