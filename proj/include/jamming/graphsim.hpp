#pragma once

// Monte Carlo of the jamming process on Erdos-Renyi graphs.
//
// Three equivalent routes to X(infinity):
//   * the stochastic recursion U_{m+1} = U_m - 1 - Bin(U_m - 1, p), which
//     defers the edge coin flips until they are needed;
//   * an explicit G(n, p) graph followed by random sequential activation;
//   * exhaustive enumeration of graphs and activation orders (n <= 6).

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "jamming/analytics.hpp"
#include "jamming/graph.hpp"
#include "jamming/rng.hpp"

namespace jamming {

struct JamOutcome {
  std::uint64_t x_inf = 0;
  std::uint64_t n_realized = 0;
  std::vector<std::uint64_t> trajectory;  // U_0..U_tau, empty unless requested
  std::vector<Vertex> excited;            // explicit-graph and spatial runs only
};

struct TimedEvent {
  double time = 0.0;
  std::uint64_t excited = 0;
  std::uint64_t unaffected = 0;
};

/// Time-stamped path: events[0] is (0, 0, n); events[m] = (T_m, m, U_m).
struct TimedTrajectory {
  std::vector<TimedEvent> events;
  double rate = 0.0;
  std::vector<std::uint64_t> sampled;  // X(t) on the requested grid

  /// Number of excitations with T_m <= t.
  [[nodiscard]] std::uint64_t excited_at(double t) const {
    std::uint64_t count = 0;
    for (std::size_t m = 1; m < events.size() && events[m].time <= t; ++m) ++count;
    return count;
  }
};

namespace detail {

inline void check_probability(double p) { require(is_probability(p), "p must lie in [0, 1]"); }

inline void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0, "time grid must be non-negative");
    require(i == 0 || grid[i - 1] <= grid[i], "time grid must be sorted");
  }
}

inline std::vector<std::uint64_t> sample_grid(const std::vector<TimedEvent>& events, std::span<const double> grid) {
  std::vector<std::uint64_t> out;
  out.reserve(grid.size());
  std::size_t m = 0;
  for (const double t : grid) {
    while (m + 1 < events.size() && events[m + 1].time <= t) ++m;
    out.push_back(events[m].excited);
  }
  return out;
}

template <class Engine>
JamOutcome run_recursion(std::uint64_t n, double p, Engine& eng, bool record_trajectory) {
  JamOutcome out;
  out.n_realized = n;
  std::uint64_t u = n;
  if (record_trajectory) out.trajectory.push_back(u);
  while (u > 0) {
    u = u - 1 - binomial(eng, u - 1, p);
    ++out.x_inf;
    if (record_trajectory) out.trajectory.push_back(u);
  }
  return out;
}

}  // namespace detail

/// Recursion path.  tau = min{m : U_m = 0} is returned as x_inf.
inline JamOutcome simulate_recursion_jamming(const ModelParams& params, RngSpec rng, bool record_trajectory = false) {
  detail::check_probability(params.p);
  StreamEngine eng(rng);
  return detail::run_recursion(params.n, params.p, eng, record_trajectory);
}

/// Explicit-graph path: realize G(n, p), then activate to jamming.
inline JamOutcome simulate_explicit_graph(const ModelParams& params, RngSpec rng, bool record_trajectory = false) {
  detail::check_probability(params.p);
  detail::require(params.n <= std::numeric_limits<Vertex>::max(), "n too large for explicit graph");
  StreamEngine eng(rng);
  const Adjacency graph = erdos_renyi_graph(params.n, params.p, eng);
  ActivationRun run = random_sequential_activation(graph, eng, record_trajectory);
  JamOutcome out;
  out.n_realized = params.n;
  out.x_inf = run.excited.size();
  out.trajectory = std::move(run.unaffected);
  out.excited = std::move(run.excited);
  return out;
}

/// Recursion path with exponential clocks: T_m - T_{m-1} ~ Exp(rate U_{m-1}).
/// Grid entries may be +infinity.
inline TimedTrajectory simulate_timed(const ModelParams& params, double rate, RngSpec rng, std::span<const double> grid) {
  detail::check_probability(params.p);
  detail::require(rate > 0.0 && std::isfinite(rate), "rate must be > 0");
  detail::check_grid(grid);
  StreamEngine eng(rng);
  TimedTrajectory out;
  out.rate = rate;
  std::uint64_t u = params.n;
  double clock = 0.0;
  out.events.push_back({0.0, 0, u});
  while (u > 0) {
    clock += exponential(eng, rate * static_cast<double>(u));
    u = u - 1 - binomial(eng, u - 1, params.p);
    out.events.push_back({clock, out.events.size(), u});
  }
  out.sampled = detail::sample_grid(out.events, grid);
  return out;
}

/// N ~ Poisson(rho V), then the recursion with p = min(1, c / max(N, 1)).
inline JamOutcome simulate_unconditional(double rho_v, double c, RngSpec rng, bool record_trajectory = false) {
  detail::require(rho_v > 0.0 && std::isfinite(rho_v), "rhoV must be > 0");
  detail::require(c > 0.0 && std::isfinite(c), "c must be > 0");
  StreamEngine eng(rng);
  const std::uint64_t n = poisson(eng, rho_v);
  const double p = std::min(1.0, c / static_cast<double>(std::max<std::uint64_t>(n, 1)));
  return detail::run_recursion(n, p, eng, record_trajectory);
}

/// Exact law of the jamming process for tiny n.
struct ExactJamLaw {
  std::vector<double> x_pmf;                      // P[X(inf) = k], k = 0..n
  std::vector<std::vector<double>> unaffected_pmf;  // [m][u] = P[U_m = u], U stays 0 after jamming
};

inline constexpr std::uint64_t kMaxEnumerationSize = 6;

/// Sums over all 2^(n choose 2) edge sets and every activation order.
inline ExactJamLaw enumerate_exact(std::uint64_t n, double p) {
  detail::require(n >= 1, "n must be >= 1");
  detail::require(n <= kMaxEnumerationSize, "n must be <= 6 for exact enumeration");
  detail::check_probability(p);

  std::vector<std::pair<unsigned, unsigned>> pairs;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const std::size_t pair_count = pairs.size();
  const unsigned full = (1u << n) - 1u;

  ExactJamLaw law;
  law.x_pmf.assign(n + 1, 0.0);
  law.unaffected_pmf.assign(n + 1, std::vector<double>(n + 1, 0.0));

  std::array<double, 64> current{};
  std::array<double, 64> next{};
  for (std::uint64_t edges = 0; edges < (1ULL << pair_count); ++edges) {
    const int present = std::popcount(edges);
    const double weight =
        std::pow(p, present) * std::pow(1.0 - p, static_cast<double>(pair_count) - present);
    if (weight == 0.0) continue;

    std::array<unsigned, kMaxEnumerationSize> closed{};
    for (unsigned v = 0; v < n; ++v) closed[v] = 1u << v;
    for (std::size_t k = 0; k < pair_count; ++k) {
      if ((edges >> k) & 1ULL) {
        closed[pairs[k].first] |= 1u << pairs[k].second;
        closed[pairs[k].second] |= 1u << pairs[k].first;
      }
    }

    current.fill(0.0);
    current[full] = 1.0;
    for (std::uint64_t m = 0; m <= n; ++m) {
      for (unsigned mask = 0; mask <= full; ++mask) {
        if (current[mask] != 0.0) law.unaffected_pmf[m][std::popcount(mask)] += weight * current[mask];
      }
      if (m == n) break;
      next.fill(0.0);
      for (unsigned mask = 0; mask <= full; ++mask) {
        const double mass = current[mask];
        if (mass == 0.0) continue;
        if (mask == 0) {
          next[0] += mass;
          continue;
        }
        const double share = mass / std::popcount(mask);
        for (unsigned v = 0; v < n; ++v) {
          if (mask & (1u << v)) next[mask & ~closed[v]] += share;
        }
      }
      current = next;
    }
  }

  // X(inf) = tau, and P[tau <= m] = P[U_m = 0].
  double previous = 0.0;
  for (std::uint64_t m = 0; m <= n; ++m) {
    const double jammed = law.unaffected_pmf[m][0];
    law.x_pmf[m] = jammed - previous;
    previous = jammed;
  }
  return law;
}

}  // namespace jamming
