#pragma once

// Parameter sets of the reproduced experiments and simulations, SI units.

#include "jamming/analytics.hpp"
#include "jamming/spatialsim.hpp"

namespace jamming::scenarios {

// Thin-slab random sequential activation: 400 x 400 x 1 um box, r = 6.5 um,
// rho = 5e9 cm^-3, exactly 800 particles, periodic in-plane.
inline constexpr double kSlabLength = 400e-6;
inline constexpr double kSlabThickness = 1e-6;
inline constexpr double kSlabRadius = 6.5e-6;
inline constexpr double kSlabDensity = 5e15;
inline constexpr std::uint64_t kSlabCount = 800;
inline constexpr double kSlabNeighbors = 0.664;  // rounded value used for the ER prediction

inline SpatialConfig slab_comparison() {
  SpatialConfig cfg;
  cfg.dimension = Dimension::slab;
  cfg.length = kSlabLength;
  cfg.width = kSlabLength;
  cfg.height = kSlabThickness;
  cfg.density = kSlabDensity;
  cfg.radius = kSlabRadius;
  cfg.boundary = Boundary::periodic;
  cfg.population = PopulationMode::fixed;
  cfg.count = kSlabCount;
  return cfg;
}

// Time-resolved excitation counts: rho V = 8e3 atoms, eta = 0.40, fitted
// rate 14 kHz and c = 2.7e2.
inline constexpr double kSeriesAtoms = 8e3;
inline constexpr double kSeriesEfficiency = 0.40;
inline constexpr double kSeriesAmplitude = kSeriesAtoms * kSeriesEfficiency;
inline constexpr double kSeriesRate = 14e3;
inline constexpr double kSeriesNeighbors = 2.7e2;

// Detected polariton histogram: rho = 5e17 m^-3, r = 5 um spherical
// blockade, eta = 0.4, detected mean 11, histogram scale n_s = 315.
inline constexpr double kPolaritonDensity = 5e17;
inline constexpr double kPolaritonRadius = 5e-6;
inline constexpr double kPolaritonEfficiency = 0.4;
inline constexpr double kPolaritonDetectedMean = 11.0;
inline constexpr double kPolaritonScale = 315.0;

inline BlockadeGeometry polariton_blockade() {
  BlockadeGeometry g;
  g.shape = BlockadeShape::sphere;
  g.density = kPolaritonDensity;
  g.radius = kPolaritonRadius;
  return g;
}

// Square lattice with a = 532 nm and blockade radius 1.905 um.
inline constexpr double kLatticeSpacing = 532e-9;
inline constexpr double kLatticeRadius = 1.905e-6;

inline BlockadeGeometry lattice_blockade() {
  BlockadeGeometry g;
  g.shape = BlockadeShape::square_lattice;
  g.radius = kLatticeRadius;
  g.lattice_spacing = kLatticeSpacing;
  return g;
}

}  // namespace jamming::scenarios
