#pragma once

// Small helpers shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "jamming/fit.hpp"
#include "jamming/rng.hpp"

namespace testing_support {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;  // normal-theory approximation, widened by the kurtosis term
};

template <class T>
Moments moments(const std::vector<T>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (const T x : xs) mean += static_cast<double>(x);
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const T x : xs) {
    const double d = static_cast<double>(x) - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  Moments out;
  out.mean = mean;
  out.variance = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  out.se_mean = std::sqrt(out.variance / n);
  // Var of the sample variance ~ (mu4 - sigma^4) / n
  out.se_variance = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return out;
}

/// Upper-tail p-value of Pearson's chi-square statistic for observed counts
/// against expected probabilities.  Cells with expected count below 5 are
/// pooled into their neighbour.
inline double chi_square_p_value(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs) {
  double total = 0.0;
  for (const auto o : observed) total += static_cast<double>(o);
  std::vector<double> exp_cells;
  std::vector<double> obs_cells;
  double e_acc = 0.0;
  double o_acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    e_acc += probs[k] * total;
    o_acc += static_cast<double>(k < observed.size() ? observed[k] : 0);
    if (e_acc >= 5.0) {
      exp_cells.push_back(e_acc);
      obs_cells.push_back(o_acc);
      e_acc = 0.0;
      o_acc = 0.0;
    }
  }
  for (std::size_t k = probs.size(); k < observed.size(); ++k) o_acc += static_cast<double>(observed[k]);
  if (!exp_cells.empty()) {
    exp_cells.back() += e_acc;
    obs_cells.back() += o_acc;
  }
  if (exp_cells.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t i = 0; i < exp_cells.size(); ++i) {
    const double d = obs_cells[i] - exp_cells[i];
    stat += d * d / exp_cells[i];
  }
  const boost::math::chi_squared dist(static_cast<double>(exp_cells.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Root of a continuous function with a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int rounds = 200) {
  double flo = f(lo);
  for (int i = 0; i < rounds; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1)));
  return out;
}

/// Model curve sampled at log-spaced times, optionally with multiplicative
/// Gaussian noise.
inline jamming::TimeSeries synthetic(double rate, double c, double amplitude, double noise, std::uint64_t seed, int points = 30) {
  jamming::TimeSeries s;
  jamming::StreamEngine eng(jamming::RngSpec{seed, 0});
  for (int i = 0; i < points; ++i) {
    const double t = 1e-5 * std::pow(100.0, static_cast<double>(i) / (points - 1));  // 10 us .. 1 ms
    double y = jamming::model_mean(t, rate, c, amplitude);
    if (noise > 0.0) {
      // Box-Muller from the stream
      const double u1 = 1.0 - jamming::uniform01(eng);
      const double u2 = jamming::uniform01(eng);
      y *= 1.0 + noise * std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }
    s.points.push_back({t, y});
  }
  return s;
}

}  // namespace testing_support
