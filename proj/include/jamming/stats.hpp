#pragma once

// Counting statistics of repeated trials: mean, unbiased variance, Mandel Q
// with a delete-1 jackknife error, detector thinning of samples, histograms
// and model overlays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "jamming/analytics.hpp"
#include "jamming/rng.hpp"

namespace jamming {

struct SampleSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // count - 1 denominator
  std::optional<double> mandel_q;  // absent when mean <= 0
  double se_mean = 0.0;
  std::optional<double> se_q;  // jackknife; needs count >= 3 and mean > 0
};

template <class T>
  requires std::is_arithmetic_v<T>
SampleSummary summarize(std::span<const T> samples) {
  const std::size_t n = samples.size();
  detail::require(n >= 2, "summarize needs at least two samples");
  const double nd = static_cast<double>(n);

  double mean = 0.0;
  for (const T x : samples) mean += static_cast<double>(x);
  mean /= nd;
  // second pass on deviations
  double ss = 0.0;
  double drift = 0.0;
  for (const T x : samples) {
    const double d = static_cast<double>(x) - mean;
    ss += d * d;
    drift += d;
  }
  ss -= drift * drift / nd;
  ss = std::max(ss, 0.0);

  SampleSummary out;
  out.count = n;
  out.mean = mean;
  out.variance = ss / (nd - 1.0);
  out.se_mean = std::sqrt(out.variance / nd);
  if (!(mean > 0.0)) return out;
  out.mandel_q = mandel_q(mean, out.variance);
  if (n < 3) return out;

  // Leave-one-out moments from the deviations d_i = x_i - mean:
  //   mean_(i) = mean - d_i / (n - 1)
  //   var_(i)  = (ss - d_i^2 n / (n - 1)) / (n - 2)
  std::vector<double> q_loo(n);
  double q_bar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(samples[i]) - mean;
    const double m_i = mean - d / (nd - 1.0);
    const double v_i = std::max(0.0, ss - d * d * nd / (nd - 1.0)) / (nd - 2.0);
    if (!(m_i > 0.0)) return out;  // a replicate with zero mean has no Q
    q_loo[i] = v_i / m_i - 1.0;
    q_bar += q_loo[i];
  }
  q_bar /= nd;
  double spread = 0.0;
  for (const double q : q_loo) spread += (q - q_bar) * (q - q_bar);
  out.se_q = std::sqrt((nd - 1.0) / nd * spread);
  return out;
}

template <class T>
  requires std::is_arithmetic_v<T>
SampleSummary summarize(const std::vector<T>& samples) {
  return summarize(std::span<const T>(samples));
}

/// Replaces every count k by an independent Bin(k, efficiency) draw.  Sample
/// i uses the child stream i of `rng`, so the result is order independent.
inline std::vector<std::uint64_t> thin_detector(std::span<const std::uint64_t> samples, double efficiency, RngSpec rng) {
  detail::require(detail::is_probability(efficiency), "efficiency must lie in [0, 1]");
  const StreamEngine root(rng);
  std::vector<std::uint64_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    StreamEngine eng = root.fork(i);
    out[i] = binomial(eng, samples[i], efficiency);
  }
  return out;
}

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::uint64_t count = 0;

  [[nodiscard]] double center() const { return 0.5 * (left + right); }
};

/// Bins are [left, right), anchored at multiples of the width.
struct Histogram {
  double bin_width = 1.0;
  double scale = 1.0;  // n_s, overlay normalization
  std::vector<HistogramBin> bins;

  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& b : bins) t += b.count;
    return t;
  }
};

/// Empty bins spanning [first, last) in steps of `bin_width`.
inline Histogram make_bins(double first, double last, double bin_width, double scale) {
  detail::require(bin_width > 0.0 && std::isfinite(bin_width), "bin width must be > 0");
  detail::require(scale > 0.0 && std::isfinite(scale), "scale must be > 0");
  Histogram h;
  h.bin_width = bin_width;
  h.scale = scale;
  const auto lo = static_cast<std::int64_t>(std::floor(first / bin_width));
  const auto hi = static_cast<std::int64_t>(std::ceil(last / bin_width));
  for (std::int64_t k = lo; k < std::max(hi, lo + 1); ++k)
    h.bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, 0});
  return h;
}

template <class T>
  requires std::is_arithmetic_v<T>
Histogram make_histogram(std::span<const T> samples, double bin_width, double scale) {
  detail::require(bin_width > 0.0 && std::isfinite(bin_width), "bin width must be > 0");
  detail::require(!samples.empty(), "histogram needs at least one sample");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const auto bin_of = [&](double x) { return static_cast<std::int64_t>(std::floor(x / bin_width)); };
  const std::int64_t first = bin_of(static_cast<double>(*lo_it));
  const std::int64_t last = bin_of(static_cast<double>(*hi_it));
  Histogram h = make_bins(static_cast<double>(first) * bin_width, static_cast<double>(last + 1) * bin_width,
                          bin_width, scale);
  h.bins.resize(static_cast<std::size_t>(last - first + 1));
  for (const T x : samples) ++h.bins[static_cast<std::size_t>(bin_of(static_cast<double>(x)) - first)].count;
  return h;
}

struct NormalModel {
  double mean = 0.0;
  double variance = 1.0;
};

struct PoissonModel {
  double mean = 1.0;
};

inline double normal_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

inline double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const auto kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

/// n_s * width * pdf(bin center).
inline std::vector<double> overlay_curve(const Histogram& hist, const NormalModel& model) {
  detail::require(model.variance > 0.0, "normal overlay needs variance > 0");
  std::vector<double> out;
  out.reserve(hist.bins.size());
  for (const auto& b : hist.bins) out.push_back(hist.scale * hist.bin_width * normal_pdf(b.center(), model.mean, model.variance));
  return out;
}

/// n_s * pmf(k), k the integer nearest the bin center with halves rounded
/// down, so a unit bin [k, k + 1) maps to k.
inline std::vector<double> overlay_curve(const Histogram& hist, const PoissonModel& model) {
  detail::require(model.mean >= 0.0, "poisson overlay needs mean >= 0");
  std::vector<double> out;
  out.reserve(hist.bins.size());
  for (const auto& b : hist.bins) {
    const auto k = static_cast<std::int64_t>(std::ceil(b.center() - 0.5));
    out.push_back(hist.scale * poisson_pmf(k, model.mean));
  }
  return out;
}

}  // namespace jamming
