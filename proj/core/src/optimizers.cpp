#include "qevo/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qevo/error.hpp"
#include "qevo/parallel.hpp"

namespace qevo::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

Method parse_method(std::string_view s) {
  if (s == "spsa") return Method::Spsa;
  if (s == "imfil") return Method::Imfil;
  throw Error(Errc::InvalidConfig, "unknown optimizer '" + std::string(s) + "'");
}

std::string_view to_string(Method m) noexcept { return m == Method::Spsa ? "spsa" : "imfil"; }

std::vector<double> evaluate_all(const Objective& f, const std::vector<std::vector<double>>& points,
                                 const std::vector<EvalTag>& tags) {
  std::vector<double> out(points.size());
  parallel_each(points.size(), [&](std::size_t i) { out[i] = f(points[i], tags[i]); });
  return out;
}

std::vector<double> spsa_gradient(std::span<const double> theta, const Objective& f, double c, int resamplings,
                                  Philox& rng, EvalCounter& counter, int iteration) {
  if (resamplings < 1) throw Error(Errc::InvalidConfig, "resamplings must be at least 1");
  const std::size_t n = theta.size();
  std::vector<std::vector<int>> deltas(static_cast<std::size_t>(resamplings), std::vector<int>(n));
  std::vector<std::vector<double>> points;
  std::vector<EvalTag> tags;
  for (auto& delta : deltas) {
    for (auto& d : delta) d = rng.rademacher();
    for (const int sign : {1, -1}) {
      std::vector<double> p(theta.begin(), theta.end());
      for (std::size_t i = 0; i < n; ++i) p[i] += sign * c * delta[i];
      points.push_back(std::move(p));
      tags.push_back(counter.next(iteration));
    }
  }
  const auto values = evaluate_all(f, points, tags);
  std::vector<double> g(n, 0.0);
  for (std::size_t r = 0; r < deltas.size(); ++r) {
    const double diff = (values[2 * r] - values[2 * r + 1]) / (2 * c);
    for (std::size_t i = 0; i < n; ++i) g[i] += diff * deltas[r][i];
  }
  for (auto& x : g) x /= resamplings;
  return g;
}

Spsa::Spsa(const SpsaConfig& cfg, int max_iterations, std::uint64_t seed)
    : cfg_(cfg), a_(cfg.a), A_(cfg.A >= 0 ? cfg.A : 0.1 * max_iterations), rng_(seed, 0x5b5a) {
  if (cfg.c <= 0) throw Error(Errc::InvalidConfig, "spsa.c must be positive");
  if (cfg.resamplings < 1) throw Error(Errc::InvalidConfig, "spsa.resamplings must be at least 1");
}

void Spsa::calibrate(std::span<const double> theta, const Objective& f, EvalCounter& counter) {
  // Mean |g_i| over a few single-direction estimates sets a so that the
  // first step moves about target_step per coordinate.
  double magnitude = 0.0;
  const int samples = std::max(1, cfg_.calibration_samples);
  for (int s = 0; s < samples; ++s) {
    const auto g = spsa_gradient(theta, f, cfg_.c, 1, rng_, counter, 0);
    if (!all_finite(g)) continue;
    magnitude += std::abs(g[0]) / samples;
  }
  a_ = magnitude > 0 ? cfg_.target_step * std::pow(A_ + 1, cfg_.alpha) / magnitude : cfg_.target_step;
}

std::vector<double> Spsa::step(std::span<const double> theta, const Objective& f, EvalCounter& counter,
                               int iteration, OptStep& info) {
  if (a_ <= 0) calibrate(theta, f, counter);
  const double ck = cfg_.c / std::pow(iteration + 1, cfg_.gamma);
  double ak = a_ / std::pow(A_ + iteration + 1, cfg_.alpha);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto g = spsa_gradient(theta, f, ck, cfg_.resamplings, rng_, counter, iteration);
    if (all_finite(g)) {
      std::vector<double> next(theta.begin(), theta.end());
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= ak * g[i];
      info.grad_norm = norm(g);
      return next;
    }
    ak /= 2;
  }
  throw Error(Errc::NonFiniteLoss, "spsa gradient stayed non-finite after shrinking the gain");
}

Imfil::Imfil(const ImfilConfig& cfg) : cfg_(cfg), h_(cfg.initial_scale) {
  if (cfg.initial_scale <= 0 || cfg.min_scale <= 0) throw Error(Errc::InvalidConfig, "imfil scales must be positive");
  if (cfg.scale_decay <= 0 || cfg.scale_decay >= 1) throw Error(Errc::InvalidConfig, "imfil.scale_decay must be in (0, 1)");
  if (cfg.max_stencil_failures < 1) throw Error(Errc::InvalidConfig, "imfil.max_stencil_failures must be at least 1");
}

std::vector<double> Imfil::step(std::span<const double> theta, double center, const Objective& f,
                                EvalCounter& counter, int iteration, OptStep& info) {
  info.scale = h_;
  const std::size_t n = theta.size();
  std::vector<std::vector<double>> points;
  std::vector<EvalTag> tags;
  points.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const double sign : {1.0, -1.0}) {
      std::vector<double> p(theta.begin(), theta.end());
      p[i] += sign * h_;
      points.push_back(std::move(p));
      tags.push_back(counter.next(iteration));
    }
  }
  auto values = evaluate_all(f, points, tags);
  for (auto& v : values) {
    if (!std::isfinite(v)) v = kInf;
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  if (!std::isfinite(center)) center = kInf;
  if (values[best] < center) return std::move(points[best]);
  if (++failures_ >= cfg_.max_stencil_failures) {
    h_ *= cfg_.scale_decay;
    failures_ = 0;
  }
  return {theta.begin(), theta.end()};
}

bool converged(std::span<const double> losses, int window, double eps) {
  if (window < 2 || losses.size() < static_cast<std::size_t>(window)) return false;
  const auto tail = losses.subspan(losses.size() - window);
  const std::size_t half = tail.size() / 2;
  const double early = std::accumulate(tail.begin(), tail.begin() + half, 0.0) / half;
  const double late = std::accumulate(tail.begin() + half, tail.end(), 0.0) / (tail.size() - half);
  return std::abs(late - early) <= eps;
}

RunResult run_optimizer(std::vector<double> init, const Objective& f, const OptimizerConfig& cfg,
                        const std::function<void(const OptStep&)>& on_step) {
  if (cfg.max_iterations < 0) throw Error(Errc::InvalidConfig, "max_iterations must be nonnegative");
  RunResult result;
  result.theta = std::move(init);
  EvalCounter counter;
  std::optional<Spsa> spsa;
  std::optional<Imfil> imfil;
  if (cfg.method == Method::Spsa) {
    spsa.emplace(cfg.spsa, cfg.max_iterations, cfg.seed);
  } else {
    imfil.emplace(cfg.imfil);
  }
  std::vector<double> losses;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (imfil && imfil->exhausted()) break;
    OptStep info;
    info.iteration = it;
    info.theta = result.theta;
    info.loss = f(result.theta, counter.next(it, true));
    if (!std::isfinite(info.loss) && spsa) throw Error(Errc::NonFiniteLoss, "measured loss is not finite");
    std::vector<double> next =
        spsa ? spsa->step(result.theta, f, counter, it, info) : imfil->step(result.theta, info.loss, f, counter, it, info);
    info.evaluations = counter.issued();
    losses.push_back(info.loss);
    result.theta = std::move(next);
    if (on_step) on_step(info);
    result.trajectory.push_back(std::move(info));
    if (cfg.convergence_eps > 0 && converged(losses, cfg.window, cfg.convergence_eps)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace qevo::opt
