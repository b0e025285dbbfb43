#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/optimizers.hpp"

namespace qevo::opt {
namespace {

constexpr int kDim = 10;

std::vector<double> optimum() {
  std::vector<double> t(kDim);
  for (int i = 0; i < kDim; ++i) t[i] = 0.9 * std::sin(1.7 * i + 0.3);
  return t;
}

// Anisotropic quadratic with curvatures 1..2.8.
Objective quadratic() {
  return [star = optimum()](std::span<const double> x, const EvalTag&) {
    double f = 0.0;
    for (int i = 0; i < kDim; ++i) f += (1.0 + 0.2 * i) * (x[i] - star[i]) * (x[i] - star[i]);
    return f;
  };
}

double distance(const std::vector<double>& x) {
  auto star = optimum();
  double d = 0.0;
  for (int i = 0; i < kDim; ++i) d += (x[i] - star[i]) * (x[i] - star[i]);
  return std::sqrt(d);
}

OptimizerConfig spsa_config() {
  OptimizerConfig cfg;
  cfg.method = Method::Spsa;
  cfg.max_iterations = 1500;
  cfg.seed = 5;
  cfg.spsa.a = 0.1;
  cfg.spsa.A = 50;
  cfg.spsa.c = 0.05;
  cfg.spsa.resamplings = 2;
  return cfg;
}

OptimizerConfig imfil_config() {
  OptimizerConfig cfg;
  cfg.method = Method::Imfil;
  cfg.max_iterations = 2000;
  cfg.imfil.initial_scale = 0.5;
  cfg.imfil.min_scale = 1e-4;
  return cfg;
}

TEST(Optimizers, SpsaReachesQuadraticMinimum) {
  auto r = run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), spsa_config());
  EXPECT_LT(distance(r.theta), 1e-2);
}

TEST(Optimizers, ImfilReachesQuadraticMinimum) {
  auto r = run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), imfil_config());
  EXPECT_LT(distance(r.theta), 1e-2);
  EXPECT_LT(r.trajectory.back().scale, 1e-4 * 2);
}

TEST(Optimizers, ResamplingReducesGradientVariance) {
  auto f = quadratic();
  std::vector<double> theta(kDim, 0.0);
  auto total_variance = [&](int resamplings) {
    Philox rng(99, resamplings);
    EvalCounter counter;
    const int trials = 4000;
    std::vector<double> mean(kDim, 0.0), sq(kDim, 0.0);
    for (int t = 0; t < trials; ++t) {
      auto g = spsa_gradient(theta, f, 0.05, resamplings, rng, counter, 0);
      for (int i = 0; i < kDim; ++i) {
        mean[i] += g[i];
        sq[i] += g[i] * g[i];
      }
    }
    double v = 0.0;
    for (int i = 0; i < kDim; ++i) v += sq[i] / trials - (mean[i] / trials) * (mean[i] / trials);
    return v;
  };
  double base = total_variance(1);
  for (int r : {4, 10}) EXPECT_NEAR(base / total_variance(r) / r, 1.0, 0.2) << r;
}

TEST(Optimizers, SameSeedSameTrajectory) {
  auto cfg = spsa_config();
  cfg.max_iterations = 50;
  auto a = run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), cfg);
  auto b = run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), cfg);
  EXPECT_EQ(a.theta, b.theta);
}

TEST(Optimizers, MeasurementTagsOncePerIteration) {
  int measured = 0;
  Objective f = [&, q = quadratic()](std::span<const double> x, const EvalTag& tag) {
    if (tag.measurement) ++measured;
    return q(x, tag);
  };
  auto cfg = imfil_config();
  cfg.max_iterations = 7;
  auto r = run_optimizer(std::vector<double>(kDim, 0.0), f, cfg);
  EXPECT_EQ(r.trajectory.size(), 7u);
  EXPECT_EQ(measured, 7);
  EXPECT_EQ(r.trajectory.back().evaluations, 7u * (2 * kDim + 1));
}

TEST(Optimizers, WindowConvergence) {
  std::vector<double> flat(50, 1.0);
  EXPECT_TRUE(converged(flat, 50, 1e-6));
  std::vector<double> falling(50);
  for (int i = 0; i < 50; ++i) falling[i] = 1.0 - 0.01 * i;
  EXPECT_FALSE(converged(falling, 50, 1e-3));
  EXPECT_FALSE(converged(std::vector<double>(10, 1.0), 50, 1e-3));
}

TEST(Optimizers, BudgetEdgeCases) {
  auto cfg = imfil_config();
  cfg.max_iterations = 0;
  EXPECT_TRUE(run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), cfg).trajectory.empty());
  cfg.max_iterations = -1;
  EXPECT_THROW(run_optimizer(std::vector<double>(kDim, 0.0), quadratic(), cfg), Error);
}

TEST(Optimizers, NonFiniteSpsaLossThrows) {
  Objective f = [](std::span<const double>, const EvalTag&) { return std::numeric_limits<double>::infinity(); };
  auto cfg = spsa_config();
  cfg.max_iterations = 3;
  try {
    run_optimizer(std::vector<double>(kDim, 0.0), f, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteLoss);
  }
}

}  // namespace
}  // namespace qevo::opt
