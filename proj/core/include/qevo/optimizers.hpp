#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qevo/rng.hpp"

namespace qevo::opt {

enum class Method { Spsa, Imfil };

Method parse_method(std::string_view s);
std::string_view to_string(Method m) noexcept;

struct SpsaConfig {
  double a = 0.0;   // <= 0: calibrate from the first gradient samples
  double c = 0.1;
  double A = -1.0;  // < 0: 0.1 * max_iterations
  double alpha = 0.602;
  double gamma = 0.101;
  int resamplings = 1;
  double target_step = 0.1;  // calibration: first step size per coordinate
  int calibration_samples = 25;
};

struct ImfilConfig {
  double initial_scale = 0.5;
  double scale_decay = 0.5;
  double min_scale = 1e-3;
  int max_stencil_failures = 1;
};

struct OptimizerConfig {
  Method method = Method::Imfil;
  int max_iterations = 1000;
  double convergence_eps = 0.0;  // 0 disables the window test
  int window = 50;
  std::uint64_t seed = 0;
  SpsaConfig spsa;
  ImfilConfig imfil;
};

/// Identifies one objective call. Each call gets a distinct id so sampled
/// objectives can draw fresh, reproducible shots. `measurement` marks the
/// once-per-iteration evaluation at the current point.
struct EvalTag {
  std::uint64_t id = 0;
  int iteration = 0;
  bool measurement = false;
};

using Objective = std::function<double(std::span<const double>, const EvalTag&)>;

struct OptStep {
  int iteration = 0;
  std::vector<double> theta;  // point the loss was measured at
  double loss = 0.0;
  double grad_norm = 0.0;  // SPSA
  double scale = 0.0;      // imfil stencil scale
  std::uint64_t evaluations = 0;  // cumulative objective calls
};

/// Hands out evaluation tags in a fixed order.
class EvalCounter {
 public:
  EvalTag next(int iteration, bool measurement = false) { return {next_++, iteration, measurement}; }
  std::uint64_t issued() const noexcept { return next_; }

 private:
  std::uint64_t next_ = 0;
};

/// Evaluates points in parallel; results in input order.
std::vector<double> evaluate_all(const Objective& f, const std::vector<std::vector<double>>& points,
                                 const std::vector<EvalTag>& tags);

/// Simultaneous-perturbation gradient averaged over `resamplings`
/// independent Rademacher directions.
std::vector<double> spsa_gradient(std::span<const double> theta, const Objective& f, double c, int resamplings,
                                  Philox& rng, EvalCounter& counter, int iteration);

class Spsa {
 public:
  Spsa(const SpsaConfig& cfg, int max_iterations, std::uint64_t seed);

  /// One update; `iteration` indexes the gain sequences. Non-finite losses
  /// halve the gain and retry once before throwing NonFiniteLoss.
  std::vector<double> step(std::span<const double> theta, const Objective& f, EvalCounter& counter, int iteration,
                           OptStep& info);

  double a() const noexcept { return a_; }

 private:
  void calibrate(std::span<const double> theta, const Objective& f, EvalCounter& counter);

  SpsaConfig cfg_;
  double a_;
  double A_;
  Philox rng_;
};

class Imfil {
 public:
  explicit Imfil(const ImfilConfig& cfg);

  /// Evaluates the +-h stencil around theta and moves to the best point if
  /// it beats `center`. Non-finite stencil values count as +infinity.
  std::vector<double> step(std::span<const double> theta, double center, const Objective& f, EvalCounter& counter,
                           int iteration, OptStep& info);

  double scale() const noexcept { return h_; }
  bool exhausted() const noexcept { return h_ < cfg_.min_scale; }

 private:
  ImfilConfig cfg_;
  double h_;
  int failures_ = 0;
};

/// Window test: the means of the two halves of the last `window` losses
/// differ by at most eps.
bool converged(std::span<const double> losses, int window, double eps);

struct RunResult {
  std::vector<double> theta;
  std::vector<OptStep> trajectory;
  bool converged = false;
};

/// Measure -> step loop until the window test passes, imfil runs out of
/// scale or max_iterations is reached. `on_step` sees every measured step.
RunResult run_optimizer(std::vector<double> init, const Objective& f, const OptimizerConfig& cfg,
                        const std::function<void(const OptStep&)>& on_step = {});

}  // namespace qevo::opt
