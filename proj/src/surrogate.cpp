#include "view/surrogate.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace view {

bool Bounds::contains(const Point& p, double slack) const {
  if (p.size() != lo.size()) return false;
  for (int k = 0; k < dim(); ++k) {
    if (p[k] < lo[k] - slack || p[k] > hi[k] + slack) return false;
  }
  return true;
}

Bounds Bounds::from_box(const Box& box) {
  Bounds b;
  b.lo = box.lo;
  b.hi = box.hi;
  return b;
}

namespace {

Point uniform_in(const Bounds& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point p(b.dim());
  for (int k = 0; k < b.dim(); ++k) p[k] = b.lo[k] + unit(rng) * (b.hi[k] - b.lo[k]);
  return p;
}

Bounds clip_to(const Bounds& sub, const Bounds& outer) {
  Bounds out = sub;
  for (int k = 0; k < out.dim(); ++k) {
    out.lo[k] = std::max(out.lo[k], outer.lo[k]);
    out.hi[k] = std::min(out.hi[k], outer.hi[k]);
    if (out.lo[k] > out.hi[k]) out.lo[k] = out.hi[k] = 0.5 * (out.lo[k] + out.hi[k]);
  }
  return out;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

struct GpOptimizer::Impl {
  Bounds bounds;
  GpConfig config;
  std::mt19937_64 rng;
  std::vector<std::pair<Point, double>> history;

  double ell{0.1};
  double y_mean{0.0};
  double y_std{1.0};
  Eigen::MatrixXd chol_l;      // Cholesky factor of K + noise
  Eigen::VectorXd alpha;       // (K + noise)^-1 y_norm

  explicit Impl(Bounds b, std::uint64_t seed, GpConfig c)
      : bounds(std::move(b)), config(c), rng(seed) {
    ell = std::max(config.length_scale_frac * bounds.diagonal(), 1e-6);
  }

  double kernel(const Point& a, const Point& b) const {
    const double d2 = (a - b).squaredNorm();
    return config.signal_variance * std::exp(-0.5 * d2 / (ell * ell));
  }

  Eigen::VectorXd normalized_targets() const {
    const int n = static_cast<int>(history.size());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = (history[i].second - y_mean) / y_std;
    return y;
  }

  void rebuild() {
    const int n = static_cast<int>(history.size());
    if (n == 0) return;
    double sum = 0.0;
    for (const auto& [p, v] : history) sum += v;
    y_mean = sum / n;
    double var = 0.0;
    for (const auto& [p, v] : history) var += (v - y_mean) * (v - y_mean);
    y_std = std::max(std::sqrt(var / n), 1e-12);

    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        k(i, j) = k(j, i) = kernel(history[i].first, history[j].first);
      }
      k(i, i) += config.noise_variance + config.jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    chol_l = llt.matrixL();
    alpha = llt.solve(normalized_targets());
  }

  double log_marginal() const {
    const int n = static_cast<int>(history.size());
    const Eigen::VectorXd y = normalized_targets();
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(chol_l(i, i));
    return -0.5 * y.dot(alpha) - log_det - 0.5 * n * std::log(2.0 * M_PI);
  }

  void refit() {
    const double base = std::max(bounds.diagonal(), 1e-6);
    const double grid[] = {0.05, 0.1, 0.2, 0.4, 0.8};
    double best_ell = ell;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (double frac : grid) {
      ell = frac * base;
      rebuild();
      const double lml = log_marginal();
      if (lml > best_lml) {
        best_lml = lml;
        best_ell = ell;
      }
    }
    ell = best_ell;
    rebuild();
  }

  std::pair<double, double> predict(const Point& p) const {
    if (history.empty()) return {0.0, config.signal_variance};
    const int n = static_cast<int>(history.size());
    Eigen::VectorXd ks(n);
    for (int i = 0; i < n; ++i) ks[i] = kernel(p, history[i].first);
    const double mean_norm = ks.dot(alpha);
    const Eigen::VectorXd v =
        chol_l.triangularView<Eigen::Lower>().solve(ks);
    const double var_norm =
        std::max(kernel(p, p) - v.squaredNorm(), 0.0);
    return {y_mean + y_std * mean_norm, y_std * y_std * var_norm};
  }

  double ei(const Point& p) const {
    if (history.empty()) return 0.0;
    double best = history[0].second;
    for (const auto& [q, v] : history) best = std::max(best, v);
    const auto [mean, var] = predict(p);
    const double sd = std::sqrt(var);
    if (sd < 1e-12) return 0.0;
    const double z = (mean - best) / sd;
    return (mean - best) * normal_cdf(z) + sd * normal_pdf(z);
  }

  Point propose(const Bounds& region) {
    if (history.empty()) return uniform_in(region, rng);
    const int n = static_cast<int>(history.size());
    const int d = bounds.dim();
    const int m = config.ei_candidates;
    Eigen::MatrixXd cands(d, m);
    for (int j = 0; j < m; ++j) cands.col(j) = uniform_in(region, rng);

    // batched posterior over all candidates
    Eigen::MatrixXd ks(n, m);
    for (int i = 0; i < n; ++i) {
      ks.row(i) =
          (cands.colwise() - history[i].first).colwise().squaredNorm();
    }
    ks = (config.signal_variance *
          (-0.5 / (ell * ell) * ks.array()).exp())
             .matrix();
    const Eigen::VectorXd mean_norm = ks.transpose() * alpha;
    const Eigen::MatrixXd v = chol_l.triangularView<Eigen::Lower>().solve(ks);
    const Eigen::ArrayXd var_norm =
        (config.signal_variance - v.colwise().squaredNorm().transpose().array())
            .max(0.0);

    double best_y = history[0].second;
    for (const auto& [q, val] : history) best_y = std::max(best_y, val);
    int best_j = 0;
    double best_ei = -1.0;
    for (int j = 0; j < m; ++j) {
      const double mean = y_mean + y_std * mean_norm[j];
      const double sd = y_std * std::sqrt(var_norm[j]);
      double e = 0.0;
      if (sd >= 1e-12) {
        const double z = (mean - best_y) / sd;
        e = (mean - best_y) * normal_cdf(z) + sd * normal_pdf(z);
      }
      if (e > best_ei) {
        best_ei = e;
        best_j = j;
      }
    }
    return cands.col(best_j);
  }
};

GpOptimizer::GpOptimizer(Bounds bounds, std::uint64_t seed, GpConfig config)
    : impl_(std::make_unique<Impl>(std::move(bounds), seed, config)) {}

GpOptimizer::~GpOptimizer() = default;

Point GpOptimizer::ask() { return impl_->propose(impl_->bounds); }

Point GpOptimizer::ask_in(const Bounds& sub) {
  return impl_->propose(clip_to(sub, impl_->bounds));
}

void GpOptimizer::tell(const Point& p, double value) {
  if (!impl_->bounds.contains(p)) {
    throw OutOfBoundsError("observation outside optimizer bounds");
  }
  impl_->history.emplace_back(p, value);
  if (static_cast<int>(impl_->history.size()) % impl_->config.refit_every == 0) {
    impl_->refit();
  } else {
    impl_->rebuild();
  }
}

const std::vector<std::pair<Point, double>>& GpOptimizer::history() const {
  return impl_->history;
}

const Bounds& GpOptimizer::bounds() const { return impl_->bounds; }

std::pair<double, double> GpOptimizer::predict(const Point& p) const {
  return impl_->predict(p);
}

double GpOptimizer::expected_improvement(const Point& p) const {
  return impl_->ei(p);
}

double GpOptimizer::length_scale() const { return impl_->ell; }

RandomSearchOptimizer::RandomSearchOptimizer(Bounds bounds, std::uint64_t seed)
    : bounds_(std::move(bounds)), rng_(seed) {}

Point RandomSearchOptimizer::ask() { return uniform_in(bounds_, rng_); }

Point RandomSearchOptimizer::ask_in(const Bounds& sub) {
  return uniform_in(clip_to(sub, bounds_), rng_);
}

void RandomSearchOptimizer::tell(const Point& p, double value) {
  if (!bounds_.contains(p)) {
    throw OutOfBoundsError("observation outside optimizer bounds");
  }
  history_.emplace_back(p, value);
}

const std::vector<std::pair<Point, double>>& RandomSearchOptimizer::history() const {
  return history_;
}

const Bounds& RandomSearchOptimizer::bounds() const { return bounds_; }

}  // namespace view
