#pragma once

// Continuum random sequential activation of particles scattered in a box:
// particles closer than the blockade radius block one another.  Used to
// compare the spatial process against the Erdos-Renyi predictions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jamming/analytics.hpp"
#include "jamming/graph.hpp"
#include "jamming/graphsim.hpp"
#include "jamming/rng.hpp"

namespace jamming {

/// planar: 2D box, areal density.  slab: thin l x w x h box, volume density;
/// distances are in-plane unless `slab_full_distance` is set.  volume: 3D box.
enum class Dimension { planar, slab, volume };
enum class Boundary { periodic, open };
enum class PopulationMode { poisson, fixed };

struct SpatialConfig {
  Dimension dimension = Dimension::slab;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double density = 0.0;  // per m^2 (planar) or per m^3
  double radius = 0.0;
  Boundary boundary = Boundary::periodic;
  PopulationMode population = PopulationMode::fixed;
  std::uint64_t count = 0;  // fixed mode
  bool slab_full_distance = false;

  /// Area (planar) or volume of the box.
  [[nodiscard]] double measure() const {
    return dimension == Dimension::planar ? length * width : length * width * height;
  }

  [[nodiscard]] double expected_count() const { return density * measure(); }

  /// Mean neighbor count implied by the geometry (interior particle).
  [[nodiscard]] double mean_neighbors() const {
    const double disk = std::numbers::pi * radius * radius;
    switch (dimension) {
      case Dimension::planar:
        return density * disk;
      case Dimension::slab:
        return density * disk * height;
      case Dimension::volume:
        return density * 4.0 / 3.0 * disk * radius;
    }
    return 0.0;
  }

  void validate() const {
    detail::require(length > 0.0 && std::isfinite(length), "length must be > 0");
    detail::require(width > 0.0 && std::isfinite(width), "width must be > 0");
    if (dimension != Dimension::planar) detail::require(height > 0.0 && std::isfinite(height), "height must be > 0");
    detail::require(radius > 0.0 && std::isfinite(radius), "radius must be > 0");
    detail::require(density >= 0.0 && std::isfinite(density), "density must be >= 0");
    if (boundary == Boundary::periodic) {
      detail::require(radius < std::min(length, width) / 2.0, "radius must be < min(length, width) / 2 with periodic boundaries");
      if (dimension == Dimension::volume)
        detail::require(radius < height / 2.0, "radius must be < height / 2 with periodic boundaries");
    }
  }
};

using Point = std::array<double, 3>;

struct Axis {
  double extent = 0.0;
  bool periodic = false;
};

struct PointSet {
  std::vector<Point> positions;
  std::array<Axis, 3> axes{};
  int dims = 2;  // coordinates used by the distance

  [[nodiscard]] std::size_t size() const { return positions.size(); }

  /// Boundary-aware squared distance.
  [[nodiscard]] double distance2(std::size_t i, std::size_t j) const {
    double sum = 0.0;
    for (int a = 0; a < dims; ++a) {
      double d = std::abs(positions[i][a] - positions[j][a]);
      if (axes[a].periodic) d = std::min(d, axes[a].extent - d);
      sum += d * d;
    }
    return sum;
  }
};

/// Axes and distance dimension of an (empty) point set for `config`.
inline PointSet empty_point_set(const SpatialConfig& config) {
  const bool periodic = config.boundary == Boundary::periodic;
  PointSet set;
  set.axes[0] = {config.length, periodic};
  set.axes[1] = {config.width, periodic};
  switch (config.dimension) {
    case Dimension::planar:
      set.dims = 2;
      break;
    case Dimension::slab:
      set.axes[2] = {config.height, false};
      set.dims = config.slab_full_distance ? 3 : 2;
      break;
    case Dimension::volume:
      set.axes[2] = {config.height, periodic};
      set.dims = 3;
      break;
  }
  return set;
}

template <class Engine>
PointSet sample_points(const SpatialConfig& config, Engine& eng) {
  config.validate();
  PointSet set = empty_point_set(config);
  const std::uint64_t n =
      config.population == PopulationMode::fixed ? config.count : poisson(eng, config.expected_count());
  const int coords = config.dimension == Dimension::planar ? 2 : 3;
  set.positions.resize(n, Point{0.0, 0.0, 0.0});
  for (auto& pt : set.positions)
    for (int a = 0; a < coords; ++a) pt[a] = uniform01(eng) * set.axes[a].extent;
  return set;
}

/// Uniform particle positions; Poisson or fixed population.
inline PointSet sample_points(const SpatialConfig& config, RngSpec rng) {
  StreamEngine eng = StreamEngine(rng).fork(0);
  return sample_points(config, eng);
}

/// Adjacency of particles within distance r, via a uniform cell grid whose
/// cell edge is the smallest value >= r that tiles each axis.
inline Adjacency neighbor_graph(const PointSet& points, double r) {
  detail::require(r > 0.0 && std::isfinite(r), "radius must be > 0");
  for (int a = 0; a < points.dims; ++a) {
    if (points.axes[a].periodic)
      detail::require(r < points.axes[a].extent / 2.0, "radius must be < half the box with periodic boundaries");
  }
  const int dims = points.dims;
  std::array<std::int64_t, 3> cells{1, 1, 1};
  std::array<double, 3> cell_size{1.0, 1.0, 1.0};
  for (int a = 0; a < dims; ++a) {
    cells[a] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(points.axes[a].extent / r)));
    cell_size[a] = points.axes[a].extent / static_cast<double>(cells[a]);
  }
  const std::int64_t total_cells = cells[0] * cells[1] * cells[2];

  auto cell_coord = [&](const Point& pt, int a) {
    auto c = static_cast<std::int64_t>(std::floor(pt[a] / cell_size[a]));
    return std::clamp<std::int64_t>(c, 0, cells[a] - 1);
  };
  auto flat = [&](std::array<std::int64_t, 3> c) { return (c[2] * cells[1] + c[1]) * cells[0] + c[0]; };

  // counting sort of particles into cells
  const std::size_t n = points.size();
  std::vector<std::int64_t> cell_of(n);
  std::vector<std::size_t> start(static_cast<std::size_t>(total_cells) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int a = 0; a < dims; ++a) c[a] = cell_coord(points.positions[i], a);
    cell_of[i] = flat(c);
    ++start[static_cast<std::size_t>(cell_of[i]) + 1];
  }
  for (std::size_t k = 0; k < static_cast<std::size_t>(total_cells); ++k) start[k + 1] += start[k];
  std::vector<std::size_t> members(n);
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) members[cursor[static_cast<std::size_t>(cell_of[i])]++] = i;
  }

  const double r2 = r * r;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<std::int64_t> stencil;
  for (std::int64_t cz = 0; cz < cells[2]; ++cz) {
    for (std::int64_t cy = 0; cy < cells[1]; ++cy) {
      for (std::int64_t cx = 0; cx < cells[0]; ++cx) {
        const std::array<std::int64_t, 3> home{cx, cy, cz};
        const std::int64_t home_id = flat(home);
        if (start[home_id] == start[home_id + 1]) continue;

        // 3^dims neighborhood, deduplicated when an axis has < 3 cells
        stencil.clear();
        const std::int64_t reach_z = dims == 3 ? 1 : 0;
        for (std::int64_t dz = -reach_z; dz <= reach_z; ++dz) {
          for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
              std::array<std::int64_t, 3> c{cx + dx, cy + dy, cz + dz};
              bool inside = true;
              for (int a = 0; a < dims; ++a) {
                if (c[a] < 0 || c[a] >= cells[a]) {
                  if (!points.axes[a].periodic) {
                    inside = false;
                    break;
                  }
                  c[a] = (c[a] + cells[a]) % cells[a];
                }
              }
              if (inside) stencil.push_back(flat(c));
            }
          }
        }
        std::sort(stencil.begin(), stencil.end());
        stencil.erase(std::unique(stencil.begin(), stencil.end()), stencil.end());

        for (std::size_t hi = start[home_id]; hi < start[home_id + 1]; ++hi) {
          const std::size_t i = members[hi];
          for (const std::int64_t other : stencil) {
            for (std::size_t oj = start[other]; oj < start[other + 1]; ++oj) {
              const std::size_t j = members[oj];
              if (j <= i) continue;
              if (points.distance2(i, j) <= r2) edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
            }
          }
        }
      }
    }
  }
  return Adjacency::from_edges(n, edges);
}

template <class Engine>
JamOutcome simulate_rsa(const PointSet& points, const Adjacency& adjacency, Engine& eng, bool record_trajectory = false) {
  detail::require(adjacency.vertex_count() == points.size(), "adjacency does not match the point set");
  ActivationRun run = random_sequential_activation(adjacency, eng, record_trajectory);
  JamOutcome out;
  out.n_realized = points.size();
  out.x_inf = run.excited.size();
  out.trajectory = std::move(run.unaffected);
  out.excited = std::move(run.excited);
  return out;
}

/// Random sequential activation on the geometric graph.
inline JamOutcome simulate_rsa(const PointSet& points, const Adjacency& adjacency, RngSpec rng,
                               bool record_trajectory = false) {
  StreamEngine eng = StreamEngine(rng).fork(1);
  return simulate_rsa(points, adjacency, eng, record_trajectory);
}

/// Same jump chain as simulate_rsa with Exp(rate U_m) holding times.
inline TimedTrajectory simulate_rsa_timed(const PointSet& points, const Adjacency& adjacency, double rate, RngSpec rng,
                                          std::span<const double> grid) {
  detail::require(rate > 0.0 && std::isfinite(rate), "rate must be > 0");
  detail::require(adjacency.vertex_count() == points.size(), "adjacency does not match the point set");
  detail::check_grid(grid);
  StreamEngine eng = StreamEngine(rng).fork(1);
  const ActivationRun run = timed_sequential_activation(adjacency, rate, eng);
  TimedTrajectory out;
  out.rate = rate;
  out.events.push_back({0.0, 0, points.size()});
  for (std::size_t m = 0; m < run.event_times.size(); ++m)
    out.events.push_back({run.event_times[m], m + 1, run.unaffected[m + 1]});
  out.sampled = detail::sample_grid(out.events, grid);
  return out;
}

/// One complete spatial trial: sample, build the graph, activate.
struct SpatialTrial {
  PointSet points;
  JamOutcome outcome;
};

inline SpatialTrial run_spatial_trial(const SpatialConfig& config, RngSpec rng) {
  SpatialTrial trial;
  trial.points = sample_points(config, rng);
  const Adjacency graph = neighbor_graph(trial.points, config.radius);
  trial.outcome = simulate_rsa(trial.points, graph, rng);
  return trial;
}

}  // namespace jamming
