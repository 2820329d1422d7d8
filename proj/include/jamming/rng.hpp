#pragma once

// Counter-based random streams and the exact variate generators used by the
// simulators.  Every trial owns a stream that is a pure function of
// (master seed, trial index), so results do not depend on how trials are
// scheduled across workers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace jamming {

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent + kGoldenGamma) ^ mix64(index * 0xd1b54a32d192ed03ULL + kGoldenGamma));
}

}  // namespace detail

/// Stream engine: the k-th output is mix64(key + k * gamma), i.e. SplitMix64
/// with a key derived from the stream identity.  Satisfies
/// std::uniform_random_bit_generator.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit StreamEngine(RngSpec spec) noexcept
      : key_(detail::derive_key(detail::mix64(spec.master_seed), spec.trial_index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  // Independent child stream; does not advance this one.
  [[nodiscard]] StreamEngine fork(std::uint64_t index) const noexcept {
    return StreamEngine(detail::derive_key(key_, index), Raw{});
  }

  [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

 private:
  struct Raw {};
  StreamEngine(std::uint64_t key, Raw) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Variates.  All of them are exact up to double rounding: no normal or
// Poisson approximations are taken anywhere.

/// Uniform on [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, bound), Lemire's multiply-and-reject.
template <class Engine>
std::uint64_t uniform_index(Engine& eng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be > 0");
  __uint128_t m = static_cast<__uint128_t>(eng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(eng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

template <class Engine>
double exponential(Engine& eng, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  // 1 - u lies in (0, 1], so the logarithm is finite.
  return -std::log1p(-uniform01(eng)) / rate;
}

namespace detail {

inline constexpr double kInversionMeanLimit = 30.0;

// Inversion for Bin(n, p), p <= 1/2, small mean: walk the pmf up from zero.
template <class Engine>
std::uint64_t binomial_inversion(Engine& eng, std::uint64_t n, double p) {
  const double odds = p / (1.0 - p);
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double u = uniform01(eng);
  std::uint64_t k = 0;
  while (u >= pmf && k < n) {
    u -= pmf;
    pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
    ++k;
  }
  return k;
}

// Chop-down inversion started at the mode, alternating below and above it.
// Any fixed enumeration order of the support is a valid inversion, and the
// expected number of steps is O(standard deviation).
template <class Engine>
std::uint64_t binomial_mode_search(Engine& eng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  auto mode = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
  if (mode > n) mode = n;
  const double md = static_cast<double>(mode);
  const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) - std::lgamma(nd - md + 1.0) +
                         md * std::log(p) + (nd - md) * std::log1p(-p);
  const double pmf_mode = std::exp(log_pmf);

  double u = uniform01(eng);
  if (u < pmf_mode) return mode;
  u -= pmf_mode;
  std::uint64_t lo = mode;
  std::uint64_t hi = mode;
  double p_lo = pmf_mode;
  double p_hi = pmf_mode;
  while (lo > 0 || hi < n) {
    if (lo > 0) {
      p_lo *= static_cast<double>(lo) / static_cast<double>(n - lo + 1) * (q / p);
      --lo;
      if (u < p_lo) return lo;
      u -= p_lo;
    }
    if (hi < n) {
      p_hi *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * (p / q);
      ++hi;
      if (u < p_hi) return hi;
      u -= p_hi;
    }
  }
  return mode;  // residual rounding mass
}

}  // namespace detail

template <class Engine>
std::uint64_t binomial(Engine& eng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(eng, n, 1.0 - p);
  if (static_cast<double>(n) * p < detail::kInversionMeanLimit) return detail::binomial_inversion(eng, n, p);
  return detail::binomial_mode_search(eng, n, p);
}

template <class Engine>
std::uint64_t poisson(Engine& eng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  double u = uniform01(eng);
  if (mean < detail::kInversionMeanLimit) {
    double pmf = std::exp(-mean);
    std::uint64_t k = 0;
    while (u >= pmf) {
      u -= pmf;
      ++k;
      pmf *= mean / static_cast<double>(k);
      if (pmf == 0.0) break;
    }
    return k;
  }
  const auto mode = static_cast<std::uint64_t>(std::floor(mean));
  const double md = static_cast<double>(mode);
  const double pmf_mode = std::exp(md * std::log(mean) - mean - std::lgamma(md + 1.0));
  if (u < pmf_mode) return mode;
  u -= pmf_mode;
  std::uint64_t lo = mode;
  std::uint64_t hi = mode;
  double p_lo = pmf_mode;
  double p_hi = pmf_mode;
  for (;;) {
    if (lo > 0) {
      p_lo *= static_cast<double>(lo) / mean;
      --lo;
      if (u < p_lo) return lo;
      u -= p_lo;
    }
    p_hi *= mean / static_cast<double>(hi + 1);
    ++hi;
    if (u < p_hi) return hi;
    u -= p_hi;
    if (p_hi == 0.0 && (lo == 0 || p_lo == 0.0)) return mode;
  }
}

}  // namespace jamming
