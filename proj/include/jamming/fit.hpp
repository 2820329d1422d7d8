#pragma once

// Least-squares fit of the detected mean-excitation curve
//   E[X_D(t)] = A ln(1 + c - c e^{-rate t}) / c,   A = eta rho V,
// to (time, count) measurements.  Parameters are searched in log space by a
// multi-start Nelder-Mead simplex.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "jamming/analytics.hpp"
#include "jamming/simplex.hpp"

namespace jamming {

struct TimePoint {
  double t = 0.0;  // seconds
  double y = 0.0;  // detected count
};

struct TimeSeries {
  std::vector<TimePoint> points;
  std::vector<double> weights;  // optional, one per point (1 / sigma^2)

  void validate() const {
    detail::require(points.size() >= 3, "time series needs at least 3 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      detail::require(std::isfinite(points[i].t) && points[i].t >= 0.0, "t must be finite and >= 0");
      detail::require(std::isfinite(points[i].y) && points[i].y >= 0.0, "count must be finite and >= 0");
      detail::require(i == 0 || points[i - 1].t < points[i].t, "t must be strictly increasing");
    }
    if (!weights.empty()) {
      detail::require(weights.size() == points.size(), "one weight per point is required");
      for (const double w : weights) detail::require(w > 0.0 && std::isfinite(w), "weights must be > 0");
    }
  }
};

/// Free parameters take `value` as an optional initial guess; fixed ones
/// require it.
struct ParameterSetting {
  bool free = true;
  std::optional<double> value;

  static ParameterSetting fixed(double v) { return {false, v}; }
  static ParameterSetting guess(double v) { return {true, v}; }
};

struct FitSpec {
  ParameterSetting rate;
  ParameterSetting neighbors;
  ParameterSetting amplitude;
  bool weighted = false;
};

struct FitResult {
  double rate = 0.0;       // 1/s
  double neighbors = 0.0;  // c
  double amplitude = 0.0;  // A
  double sse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> start_sse;  // objective at every initial guess tried
};

/// A ln(1 + c - c e^{-rate t}) / c.
inline double model_mean(double t, double rate, double c, double amplitude) {
  detail::require(rate > 0.0, "rate must be > 0");
  detail::require(c > 0.0, "c must be > 0");
  detail::require(amplitude > 0.0, "amplitude must be > 0");
  detail::require(t >= 0.0, "t must be >= 0");
  return amplitude * mean_excitation_curve(c, rate, t);
}

/// Weighted (when requested) sum of squared residuals.
inline double sum_squared_residuals(const TimeSeries& series, double rate, double c, double amplitude,
                                    bool weighted = false) {
  double sse = 0.0;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const double r = series.points[i].y - model_mean(series.points[i].t, rate, c, amplitude);
    const double w = weighted && !series.weights.empty() ? series.weights[i] : 1.0;
    sse += w * r * r;
  }
  return sse;
}

namespace detail {

inline constexpr double kRateGridLow = 1e2;
inline constexpr double kRateGridHigh = 1e6;
inline constexpr double kNeighborGridLow = 1e-2;
inline constexpr double kNeighborGridHigh = 1e4;
inline constexpr int kGridPoints = 5;
inline constexpr double kRestartTolerance = 1e-10;
inline constexpr int kMaxRestartRounds = 50;

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
    out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return out;
}

class FitProblem {
 public:
  FitProblem(const TimeSeries& series, const FitSpec& spec) : series_(series), spec_(spec) {
    settings_ = {&spec_.rate, &spec_.neighbors, &spec_.amplitude};
    for (std::size_t k = 0; k < 3; ++k) {
      if (settings_[k]->free) free_.push_back(k);
    }
  }

  [[nodiscard]] const std::vector<std::size_t>& free_indices() const { return free_; }

  [[nodiscard]] std::array<double, 3> expand(const std::vector<double>& log_free) const {
    std::array<double, 3> p{};
    for (std::size_t k = 0; k < 3; ++k) p[k] = settings_[k]->value.value_or(1.0);
    for (std::size_t i = 0; i < free_.size(); ++i) p[free_[i]] = std::exp(log_free[i]);
    return p;
  }

  [[nodiscard]] std::vector<double> compress(const std::array<double, 3>& p) const {
    std::vector<double> x;
    for (const std::size_t k : free_) x.push_back(std::log(p[k]));
    return x;
  }

  [[nodiscard]] double sse(const std::array<double, 3>& p) const {
    for (const double v : p) {
      if (!(v > 0.0) || !std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    return sum_squared_residuals(series_, p[0], p[1], p[2], spec_.weighted);
  }

  [[nodiscard]] double objective(const std::vector<double>& log_free) const { return sse(expand(log_free)); }

  /// Least-squares amplitude for fixed rate and c (the model is linear in A).
  [[nodiscard]] double best_amplitude(double rate, double c) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < series_.points.size(); ++i) {
      const double g = mean_excitation_curve(c, rate, series_.points[i].t);
      const double w = spec_.weighted && !series_.weights.empty() ? series_.weights[i] : 1.0;
      num += w * g * series_.points[i].y;
      den += w * g * g;
    }
    return num > 0.0 && den > 0.0 ? num / den : 1.0;
  }

 private:
  const TimeSeries& series_;
  const FitSpec& spec_;
  std::array<const ParameterSetting*, 3> settings_{};
  std::vector<std::size_t> free_;
};

}  // namespace detail

/// Minimizes the SSE over the free parameters.  Starts: a 5 x 5 log grid of
/// (rate, c) over [1e2, 1e6] x [1e-2, 1e4] (collapsed along fixed axes), the
/// amplitude set by linear least squares when free, plus the user's guesses.
/// The best start is then restarted until a full round improves the SSE by
/// less than 1e-10 relative.
inline FitResult fit(const TimeSeries& series, const FitSpec& spec) {
  series.validate();
  for (const auto* s : {&spec.rate, &spec.neighbors, &spec.amplitude}) {
    if (!s->free) detail::require(s->value.has_value(), "fixed parameters need a value");
    if (s->value) detail::require(*s->value > 0.0 && std::isfinite(*s->value), "parameter values must be > 0");
  }
  detail::require(spec.rate.free || spec.neighbors.free || spec.amplitude.free, "at least one parameter must be free");
  if (spec.weighted) detail::require(!series.weights.empty(), "weighted fit needs weights");
  if (spec.rate.free) {
    const double y0 = series.points.front().y;
    const bool constant = std::all_of(series.points.begin(), series.points.end(),
                                      [&](const TimePoint& p) { return p.y == y0; });
    if (constant) throw std::domain_error("ill-posed: a constant series does not determine the rate");
  }

  const detail::FitProblem problem(series, spec);
  const auto rate_grid = spec.rate.free
                             ? detail::log_grid(detail::kRateGridLow, detail::kRateGridHigh, detail::kGridPoints)
                             : std::vector<double>{*spec.rate.value};
  const auto c_grid = spec.neighbors.free
                          ? detail::log_grid(detail::kNeighborGridLow, detail::kNeighborGridHigh, detail::kGridPoints)
                          : std::vector<double>{*spec.neighbors.value};

  std::vector<std::array<double, 3>> starts;
  for (const double rate : rate_grid) {
    for (const double c : c_grid) {
      const double a = spec.amplitude.free ? problem.best_amplitude(rate, c) : *spec.amplitude.value;
      starts.push_back({rate, c, a});
    }
  }
  if ((spec.rate.free && spec.rate.value) || (spec.neighbors.free && spec.neighbors.value) ||
      (spec.amplitude.free && spec.amplitude.value)) {
    const double rate = spec.rate.value.value_or(std::sqrt(detail::kRateGridLow * detail::kRateGridHigh));
    const double c = spec.neighbors.value.value_or(std::sqrt(detail::kNeighborGridLow * detail::kNeighborGridHigh));
    const double a = spec.amplitude.value.value_or(problem.best_amplitude(rate, c));
    starts.push_back({rate, c, a});
  }

  auto objective = [&](const std::vector<double>& x) { return problem.objective(x); };

  FitResult result;
  std::optional<std::array<double, 3>> best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    result.start_sse.push_back(problem.sse(start));
    const SimplexResult run = nelder_mead(objective, problem.compress(start));
    result.iterations += run.iterations;
    const auto candidate = problem.expand(run.x);
    if (!best || run.value < best_sse || (run.value == best_sse && candidate < *best)) {
      best = candidate;
      best_sse = run.value;
    }
  }

  for (int round = 0; round < detail::kMaxRestartRounds; ++round) {
    SimplexOptions options;
    options.initial_step = 0.1;
    const SimplexResult run = nelder_mead(objective, problem.compress(*best), options);
    result.iterations += run.iterations;
    const double improvement = best_sse - run.value;
    if (run.value < best_sse) {
      best = problem.expand(run.x);
      best_sse = run.value;
    }
    if (best_sse == 0.0 || improvement <= detail::kRestartTolerance * best_sse) {
      result.converged = true;
      break;
    }
  }

  result.rate = (*best)[0];
  result.neighbors = (*best)[1];
  result.amplitude = (*best)[2];
  result.sse = best_sse;
  return result;
}

}  // namespace jamming
