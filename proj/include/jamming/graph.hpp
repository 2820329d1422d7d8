#pragma once

// Undirected graphs in compressed sparse row form, plus the random
// sequential activation process that drives both the explicit Erdos-Renyi
// simulator and the spatial RSA simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jamming/rng.hpp"

namespace jamming {

using Vertex = std::uint32_t;

/// Symmetric adjacency, neighbor lists sorted ascending.  Memory is
/// O(vertices + edges).
class Adjacency {
 public:
  Adjacency() = default;

  /// Builds from an undirected edge list; self loops are rejected and
  /// duplicate edges collapsed.
  static Adjacency from_edges(std::size_t vertex_count, std::span<const std::pair<Vertex, Vertex>> edges) {
    Adjacency g;
    g.offsets_.assign(vertex_count + 1, 0);
    for (const auto& [a, b] : edges) {
      if (a >= vertex_count || b >= vertex_count) throw std::out_of_range("edge endpoint out of range");
      if (a == b) throw std::invalid_argument("self loops are not allowed");
      ++g.offsets_[a + 1];
      ++g.offsets_[b + 1];
    }
    for (std::size_t v = 0; v < vertex_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
    g.targets_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      g.targets_[cursor[a]++] = b;
      g.targets_[cursor[b]++] = a;
    }
    g.normalize();
    return g;
  }

  [[nodiscard]] std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  [[nodiscard]] std::size_t edge_count() const { return targets_.size() / 2; }

  [[nodiscard]] std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  [[nodiscard]] std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  [[nodiscard]] bool adjacent(Vertex a, Vertex b) const {
    const auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  // sort each list and drop duplicates, compacting storage
  void normalize() {
    std::vector<Vertex> compact;
    compact.reserve(targets_.size());
    std::vector<std::size_t> offsets(offsets_.size(), 0);
    for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
      auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
      auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
      std::sort(first, last);
      last = std::unique(first, last);
      compact.insert(compact.end(), first, last);
      offsets[v + 1] = compact.size();
    }
    targets_ = std::move(compact);
    offsets_ = std::move(offsets);
  }

  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
};

/// Erdos-Renyi G(n, p) by geometric skipping over the lower triangle
/// (Batagelj-Brandes), exact for every p in [0, 1].
template <class Engine>
Adjacency erdos_renyi_graph(std::size_t n, double p, Engine& eng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  std::vector<std::pair<Vertex, Vertex>> edges;
  if (n >= 2 && p > 0.0) {
    if (p == 1.0) {
      edges.reserve(n * (n - 1) / 2);
      for (Vertex v = 1; v < n; ++v)
        for (Vertex w = 0; w < v; ++w) edges.emplace_back(v, w);
    } else {
      const double log_q = std::log1p(-p);
      std::int64_t v = 1;
      std::int64_t w = -1;
      const auto nn = static_cast<std::int64_t>(n);
      while (v < nn) {
        const double skip = std::floor(std::log1p(-uniform01(eng)) / log_q);
        w += 1 + static_cast<std::int64_t>(std::min(skip, 9.0e15));
        while (w >= v && v < nn) {
          w -= v;
          ++v;
        }
        if (v < nn) edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(w));
      }
    }
  }
  return Adjacency::from_edges(n, edges);
}

/// Result of running random sequential activation to the jammed state.
struct ActivationRun {
  std::vector<Vertex> excited;                // in activation order
  std::vector<std::uint64_t> unaffected;      // U_0, ..., U_tau (if recorded)
  std::vector<double> event_times;            // T_1, ..., T_tau (timed runs only)
};

namespace detail {

// Runs the activation process; when rate > 0, holding times Exp(rate * U)
// are drawn before each excitation.
template <class Engine>
ActivationRun activate(const Adjacency& graph, Engine& eng, bool record, double rate) {
  enum class State : std::uint8_t { unaffected, excited, blocked };
  const std::size_t n = graph.vertex_count();
  std::vector<State> state(n, State::unaffected);
  std::vector<Vertex> pool(n);
  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    pool[i] = static_cast<Vertex>(i);
    slot[i] = i;
  }
  auto remove = [&](Vertex v) {
    const std::size_t i = slot[v];
    const Vertex last = pool.back();
    pool[i] = last;
    slot[last] = i;
    pool.pop_back();
  };

  ActivationRun run;
  if (record) run.unaffected.push_back(n);
  double clock = 0.0;
  while (!pool.empty()) {
    if (rate > 0.0) {
      clock += exponential(eng, rate * static_cast<double>(pool.size()));
      run.event_times.push_back(clock);
    }
    const Vertex v = pool[uniform_index(eng, pool.size())];
    state[v] = State::excited;
    remove(v);
    run.excited.push_back(v);
    for (const Vertex w : graph.neighbors(v)) {
      if (state[w] == State::unaffected) {
        state[w] = State::blocked;
        remove(w);
      }
    }
    if (record) run.unaffected.push_back(pool.size());
  }
  return run;
}

}  // namespace detail

/// Uniformly random unaffected vertex excites and blocks its unaffected
/// neighbors, until none remain.  The excited set is a maximal independent
/// set of the graph.
template <class Engine>
ActivationRun random_sequential_activation(const Adjacency& graph, Engine& eng, bool record_unaffected = false) {
  return detail::activate(graph, eng, record_unaffected, 0.0);
}

/// Same jump chain with exponential holding times of rate `rate * U`.
template <class Engine>
ActivationRun timed_sequential_activation(const Adjacency& graph, double rate, Engine& eng) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  return detail::activate(graph, eng, true, rate);
}

/// True when `set` is independent and dominating in `graph`.
inline bool is_maximal_independent_set(const Adjacency& graph, std::span<const Vertex> set) {
  std::vector<char> in(graph.vertex_count(), 0);
  for (const Vertex v : set) in[v] = 1;
  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    bool covered = in[v] != 0;
    for (const Vertex w : graph.neighbors(v)) {
      if (in[v] && in[w]) return false;
      covered = covered || in[w];
    }
    if (!covered) return false;
  }
  return true;
}

}  // namespace jamming
