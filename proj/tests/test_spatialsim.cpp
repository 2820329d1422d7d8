#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "jamming/scenarios.hpp"
#include "jamming/spatialsim.hpp"
#include "support.hpp"

using namespace jamming;
using testing_support::moments;

namespace {

SpatialConfig planar_box(double side, double radius, Boundary boundary) {
  SpatialConfig cfg;
  cfg.dimension = Dimension::planar;
  cfg.length = side;
  cfg.width = side;
  cfg.radius = radius;
  cfg.boundary = boundary;
  cfg.population = PopulationMode::fixed;
  return cfg;
}

PointSet with_points(const SpatialConfig& cfg, std::vector<Point> pts) {
  PointSet set = empty_point_set(cfg);
  set.positions = std::move(pts);
  return set;
}

std::set<std::pair<Vertex, Vertex>> brute_force_edges(const PointSet& pts, double r) {
  std::set<std::pair<Vertex, Vertex>> edges;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double sum = 0.0;
      for (int a = 0; a < pts.dims; ++a) {
        double d = std::abs(pts.positions[i][a] - pts.positions[j][a]);
        if (pts.axes[a].periodic) d = std::min(d, pts.axes[a].extent - d);
        sum += d * d;
      }
      if (sum <= r * r) edges.emplace(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  return edges;
}

std::set<std::pair<Vertex, Vertex>> edge_set(const Adjacency& g) {
  std::set<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (const Vertex w : g.neighbors(v))
      if (v < w) edges.emplace(v, w);
  return edges;
}

}  // namespace

TEST(SamplePoints, FixedPopulationInsideBox) {
  const auto cfg = scenarios::slab_comparison();
  const auto pts = sample_points(cfg, RngSpec{1, 0});
  ASSERT_EQ(pts.size(), 800u);
  for (const auto& p : pts.positions) {
    EXPECT_GE(p[0], 0.0);
    EXPECT_LT(p[0], cfg.length);
    EXPECT_GE(p[1], 0.0);
    EXPECT_LT(p[1], cfg.width);
    EXPECT_GE(p[2], 0.0);
    EXPECT_LT(p[2], cfg.height);
  }
  const auto again = sample_points(cfg, RngSpec{1, 0});
  EXPECT_EQ(pts.positions, again.positions);
}

TEST(SamplePoints, PoissonPopulationMoments) {
  auto cfg = scenarios::slab_comparison();
  cfg.population = PopulationMode::poisson;
  ASSERT_NEAR(cfg.expected_count(), 800.0, 1e-9);
  std::vector<std::uint64_t> counts(100000);
  for (std::uint64_t i = 0; i < counts.size(); ++i) counts[i] = sample_points(cfg, RngSpec{2, i}).size();
  const auto m = moments(counts);
  EXPECT_NEAR(m.mean, 800.0, 4 * m.se_mean);
  EXPECT_NEAR(m.variance, 800.0, 4 * m.se_variance);
}

TEST(SamplePoints, ZeroDensityIsEmpty) {
  auto cfg = scenarios::slab_comparison();
  cfg.population = PopulationMode::poisson;
  cfg.density = 0.0;
  EXPECT_EQ(sample_points(cfg, RngSpec{3, 0}).size(), 0u);
  const auto trial = run_spatial_trial(cfg, RngSpec{3, 0});
  EXPECT_EQ(trial.outcome.x_inf, 0u);
}

TEST(SamplePoints, RejectsInvalidGeometry) {
  auto cfg = planar_box(10.0, 6.0, Boundary::periodic);
  EXPECT_THROW(sample_points(cfg, RngSpec{1, 0}), std::invalid_argument);
  cfg.boundary = Boundary::open;
  EXPECT_NO_THROW(sample_points(cfg, RngSpec{1, 0}));
  cfg.radius = -1.0;
  EXPECT_THROW(sample_points(cfg, RngSpec{1, 0}), std::invalid_argument);
  auto vol = scenarios::slab_comparison();
  vol.dimension = Dimension::volume;
  EXPECT_THROW(vol.validate(), std::invalid_argument);  // r > h / 2 with periodic z
  auto slab = scenarios::slab_comparison();
  slab.height = 0.0;
  EXPECT_THROW(slab.validate(), std::invalid_argument);
}

TEST(NeighborGraph, Threshold) {
  const auto cfg = planar_box(100.0, 5.0, Boundary::periodic);
  const auto near = with_points(cfg, {{10, 10, 0}, {10 + 0.99 * 5, 10, 0}});
  EXPECT_EQ(neighbor_graph(near, 5.0).edge_count(), 1u);
  const auto far = with_points(cfg, {{10, 10, 0}, {10 + 1.01 * 5, 10, 0}});
  EXPECT_EQ(neighbor_graph(far, 5.0).edge_count(), 0u);
}

TEST(NeighborGraph, PeriodicWrap) {
  auto cfg = scenarios::slab_comparison();
  const auto pts = with_points(cfg, {{0.5e-6, 200e-6, 0.5e-6}, {399.5e-6, 200e-6, 0.5e-6}});
  EXPECT_NEAR(std::sqrt(pts.distance2(0, 1)), 1e-6, 1e-12);
  EXPECT_EQ(neighbor_graph(pts, cfg.radius).edge_count(), 1u);
  cfg.boundary = Boundary::open;
  const auto open = with_points(cfg, pts.positions);
  EXPECT_EQ(neighbor_graph(open, cfg.radius).edge_count(), 0u);
}

TEST(NeighborGraph, RejectsHalfBoxViolation) {
  const auto cfg = planar_box(10.0, 1.0, Boundary::periodic);
  const auto pts = with_points(cfg, {{1, 1, 0}, {2, 2, 0}});
  EXPECT_THROW(neighbor_graph(pts, 5.0), std::invalid_argument);
  EXPECT_THROW(neighbor_graph(pts, 0.0), std::invalid_argument);
}

TEST(NeighborGraph, MatchesBruteForce) {
  StreamEngine meta(RngSpec{4, 0});
  for (int instance = 0; instance < 100; ++instance) {
    SpatialConfig cfg;
    cfg.dimension = static_cast<Dimension>(instance % 3);
    cfg.boundary = (instance / 3) % 2 == 0 ? Boundary::periodic : Boundary::open;
    cfg.slab_full_distance = instance % 5 == 0;
    cfg.length = 1.0 + 9.0 * uniform01(meta);
    cfg.width = 1.0 + 9.0 * uniform01(meta);
    cfg.height = cfg.dimension == Dimension::volume ? 1.0 + 9.0 * uniform01(meta) : 0.2 + uniform01(meta);
    const double limit = std::min({cfg.length, cfg.width, cfg.dimension == Dimension::volume ? cfg.height : 1e9});
    cfg.radius = (0.05 + 0.44 * uniform01(meta)) * limit;
    cfg.population = PopulationMode::fixed;
    cfg.count = 1 + uniform_index(meta, 500);
    const auto pts = sample_points(cfg, RngSpec{5, static_cast<std::uint64_t>(instance)});
    const auto g = neighbor_graph(pts, cfg.radius);
    ASSERT_EQ(g.vertex_count(), pts.size());
    EXPECT_EQ(edge_set(g), brute_force_edges(pts, cfg.radius)) << "instance " << instance;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
      for (const Vertex w : g.neighbors(v)) ASSERT_TRUE(g.adjacent(w, v));
  }
}

TEST(Rsa, AllWithinRadius) {
  const auto cfg = planar_box(100.0, 5.0, Boundary::open);
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({50.0 + 0.1 * i, 50.0, 0.0});
  const auto set = with_points(cfg, pts);
  const auto g = neighbor_graph(set, 5.0);
  EXPECT_EQ(simulate_rsa(set, g, RngSpec{6, 0}).x_inf, 1u);
}

TEST(Rsa, AllFarApart) {
  const auto cfg = planar_box(100.0, 5.0, Boundary::periodic);
  std::vector<Point> pts;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) pts.push_back({10.0 * i + 1, 10.0 * j + 1, 0.0});
  const auto set = with_points(cfg, pts);
  const auto g = neighbor_graph(set, 5.0);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(simulate_rsa(set, g, RngSpec{6, 1}).x_inf, 81u);
}

TEST(Rsa, JammedStateCheck) {
  for (const bool three_d : {false, true}) {
    auto cfg = scenarios::slab_comparison();
    cfg.slab_full_distance = three_d;
    for (std::uint64_t i = 0; i < 30; ++i) {
      const auto trial = run_spatial_trial(cfg, RngSpec{7, i});
      const auto& pts = trial.points;
      std::vector<char> excited(pts.size(), 0);
      for (const Vertex v : trial.outcome.excited) excited[v] = 1;
      const double r2 = cfg.radius * cfg.radius;
      for (std::size_t a = 0; a < pts.size(); ++a) {
        bool covered = excited[a] != 0;
        for (std::size_t b = 0; b < pts.size(); ++b) {
          if (a == b || pts.distance2(a, b) > r2) continue;
          ASSERT_FALSE(excited[a] && excited[b]);
          covered = covered || excited[b];
        }
        ASSERT_TRUE(covered);
      }
      ASSERT_EQ(trial.outcome.x_inf, trial.outcome.excited.size());
    }
  }
}

TEST(Rsa, MeanDegreeMatchesSlabGeometry) {
  auto cfg = scenarios::slab_comparison();
  cfg.population = PopulationMode::poisson;
  const double c = neighbors_from_geometry({BlockadeShape::slab_cylinder, cfg.radius, cfg.density, cfg.height, {}});
  double degrees = 0.0;
  double points = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto pts = sample_points(cfg, RngSpec{8, i});
    const auto g = neighbor_graph(pts, cfg.radius);
    degrees += 2.0 * static_cast<double>(g.edge_count());
    points += static_cast<double>(pts.size());
  }
  EXPECT_NEAR(degrees / points / c, 1.0, 0.02);
}

TEST(Rsa, TranslationInvariance) {
  const auto cfg = scenarios::slab_comparison();
  const Point shift{123.4e-6, 301.7e-6, 0.0};
  std::vector<std::uint64_t> base_x;
  std::vector<std::uint64_t> moved_x;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto pts = sample_points(cfg, RngSpec{9, i});
    PointSet moved = pts;
    for (auto& p : moved.positions)
      for (int a = 0; a < 2; ++a) p[a] = std::fmod(p[a] + shift[a], moved.axes[a].extent);
    const auto g = neighbor_graph(pts, cfg.radius);
    const auto h = neighbor_graph(moved, cfg.radius);
    std::vector<std::size_t> dg;
    std::vector<std::size_t> dh;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      dg.push_back(g.degree(v));
      dh.push_back(h.degree(v));
    }
    std::sort(dg.begin(), dg.end());
    std::sort(dh.begin(), dh.end());
    ASSERT_EQ(dg, dh);
    ASSERT_EQ(edge_set(g), edge_set(h));
    base_x.push_back(simulate_rsa(pts, g, RngSpec{10, i}).x_inf);
    moved_x.push_back(simulate_rsa(moved, h, RngSpec{10, i}).x_inf);
  }
  EXPECT_EQ(base_x, moved_x);
}

TEST(RsaTimed, SinglePoint) {
  const auto cfg = planar_box(10.0, 1.0, Boundary::periodic);
  const auto set = with_points(cfg, {{5, 5, 0}});
  const auto g = neighbor_graph(set, 1.0);
  const std::vector<double> grid{0.0};
  std::vector<double> t1(200000);
  for (std::uint64_t i = 0; i < t1.size(); ++i) {
    const auto path = simulate_rsa_timed(set, g, 2.0, RngSpec{11, i}, grid);
    ASSERT_EQ(path.sampled[0], 0u);
    ASSERT_EQ(path.events.size(), 2u);
    t1[i] = path.events[1].time;
  }
  const auto m = moments(t1);
  EXPECT_NEAR(m.mean, 0.5, 4 * m.se_mean);
  EXPECT_NEAR(m.variance, 0.25, 4 * m.se_variance);
  EXPECT_THROW(simulate_rsa_timed(set, g, 0.0, RngSpec{1, 0}, grid), std::invalid_argument);
}

TEST(RsaTimed, SameJumpChainAsUntimed) {
  const auto cfg = scenarios::slab_comparison();
  const auto pts = sample_points(cfg, RngSpec{12, 0});
  const auto g = neighbor_graph(pts, cfg.radius);
  const std::vector<double> grid{INFINITY};
  const auto path = simulate_rsa_timed(pts, g, 1.0, RngSpec{12, 0}, grid);
  EXPECT_EQ(path.events.back().unaffected, 0u);
  for (std::size_t m = 1; m < path.events.size(); ++m) ASSERT_GT(path.events[m].time, path.events[m - 1].time);
  EXPECT_EQ(path.sampled[0], path.events.size() - 1);
}

TEST(RsaTimed, TracksMeanCurveOnSlab) {
  const auto cfg = scenarios::slab_comparison();
  const double rate = 1.0;
  const std::vector<double> grid{2.0, 4.0, 8.0};
  std::vector<double> sums(grid.size(), 0.0);
  const int trials = 300;
  for (int i = 0; i < trials; ++i) {
    const auto pts = sample_points(cfg, RngSpec{13, static_cast<std::uint64_t>(i)});
    const auto g = neighbor_graph(pts, cfg.radius);
    const auto path = simulate_rsa_timed(pts, g, rate, RngSpec{13, static_cast<std::uint64_t>(i)}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) sums[k] += static_cast<double>(path.sampled[k]);
  }
  const double c = cfg.mean_neighbors();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = sums[k] / trials / 800.0;
    EXPECT_NEAR(x / mean_excitation_curve(c, rate, grid[k]), 1.0, 0.05) << grid[k];
  }
}
