#pragma once

// Closed-form statistics of the blockaded excitation process on
// Erdos-Renyi graphs: exact moments of the unaffected-particle recursion,
// fluid limits, jamming-limit mean/variance/Mandel Q, the time-dependent
// mean excitation fraction, detector thinning and geometry-to-c conversion.
//
// Everything here is a pure function of its arguments.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace jamming {

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

/// Graph-model parameters: population n and edge probability p.  The mean
/// neighbor count c = n p is derived.
struct ModelParams {
  std::uint64_t n = 0;
  double p = 0.0;

  static ModelParams with_probability(std::uint64_t n, double p) {
    detail::require(detail::is_probability(p), "p must lie in [0, 1]");
    return {n, p};
  }

  /// p = c / n.  Requires c <= n so that p is a probability.
  static ModelParams with_neighbors(std::uint64_t n, double c) {
    detail::require(c >= 0.0 && std::isfinite(c), "c must be >= 0");
    if (n == 0) return {0, 0.0};
    const double p = c / static_cast<double>(n);
    detail::require(p <= 1.0, "c must be <= n");
    return {n, p};
  }

  [[nodiscard]] double mean_neighbors() const { return p * static_cast<double>(n); }
};

enum class BlockadeShape { sphere, slab_cylinder, square_lattice };

/// Blockade region around a particle.  Densities are per cubic meter and
/// lengths in meters.
struct BlockadeGeometry {
  BlockadeShape shape = BlockadeShape::sphere;
  double radius = 0.0;
  double density = 0.0;                   // sphere, slab_cylinder
  std::optional<double> thickness;        // slab_cylinder
  std::optional<double> lattice_spacing;  // square_lattice
};

struct JamStats {
  double mean = 0.0;
  double variance = 0.0;
  double mandel_q = 0.0;
};

struct DetectorModel {
  double efficiency = 1.0;
};

struct UnaffectedMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct FluidPoint {
  double unaffected = 0.0;  // u(f)
  double variance = 0.0;    // v(f)
};

/// Mandel Q of a (mean, variance) pair.
inline double mandel_q(double mean, double variance) { return variance / mean - 1.0; }

/// Exact mean and variance of U_m for U_{m+1} = U_m - 1 - Bin(U_m - 1, p),
/// U_0 = n.  The closed forms are only meaningful while the recursion is
/// defined; requests whose variance would come out negative (past jamming)
/// are rejected.
inline UnaffectedMoments exact_unaffected_moments(std::int64_t n, double p, std::int64_t m) {
  detail::require(n >= 1, "n must be >= 1");
  detail::require(m >= 0, "m must be >= 0");
  detail::require(detail::is_probability(p), "p must lie in [0, 1]");
  const auto nd = static_cast<double>(n);
  const auto md = static_cast<double>(m);
  if (p == 0.0) {
    detail::require(m <= n, "m must be <= n when p = 0");
    return {nd - md, 0.0};
  }
  if (m == 0) return {nd, 0.0};
  if (p == 1.0) return {0.0, 0.0};

  const double q = 1.0 - p;
  const double log_q = std::log1p(-p);
  const double qm = std::exp(md * log_q);
  const double qm_minus_one = std::expm1(md * log_q);      // q^m - 1
  const double q2m_minus_one = std::expm1(2.0 * md * log_q);  // q^{2m} - 1

  // E[U_m] = q^m n - (q - q^{m+1}) / p
  const double mean = qm * nd + q * qm_minus_one / p;

  // Var[U_m] = [(p-2) q^m ((n-1)p+1) + q^{2m} (1-(n-1)(p-2)p) - p + 1] / ((p-2) p)
  // rewritten with a = q^m - 1 and b = q^{2m} - 1 so that the O(1) parts
  // cancel analytically: [(s+1) a - s b] / p + b / ((p-2) p), s = (n-1) p.
  const double s = (nd - 1.0) * p;
  double variance = ((s + 1.0) * qm_minus_one - s * q2m_minus_one) / p + q2m_minus_one / ((p - 2.0) * p);

  const double rounding_floor = -1e-9 * nd;
  if (variance < 0.0) {
    detail::require(variance >= rounding_floor, "m lies beyond the jamming point of the recursion");
    variance = 0.0;
  }
  return {mean, variance};
}

/// Fluid limits u(f) = lim E[U_[fn]]/n and v(f) = lim Var[U_[fn]]/n with
/// p = c/n.
inline FluidPoint fluid_limits(double c, double f) {
  detail::require(c > 0.0, "c must be > 0");
  detail::require(f >= 0.0 && f <= 1.0, "f must lie in [0, 1]");
  const double decay = std::exp(-c * f);
  const double absorbed = -std::expm1(-c * f);  // 1 - e^{-cf}
  const double u = decay - absorbed / c;
  const double v = absorbed * ((1.0 + 2.0 * c) * decay - 1.0) / (2.0 * c);
  return {u, v};
}

/// u'(f) = -(1 + c) e^{-cf}.
inline double fluid_unaffected_slope(double c, double f) {
  detail::require(c > 0.0, "c must be > 0");
  detail::require(f >= 0.0 && f <= 1.0, "f must lie in [0, 1]");
  return -(1.0 + c) * std::exp(-c * f);
}

/// Root f* of u(f) = 0, i.e. ln(1 + c) / c.
inline double jam_fraction(double c) {
  detail::require(c > 0.0 && std::isfinite(c), "c must be > 0");
  return std::log1p(c) / c;
}

/// Conditional (fixed n) jamming-limit statistics.
inline JamStats conditional_jam_stats(std::int64_t n, double c) {
  detail::require(n >= 1, "n must be >= 1");
  detail::require(c > 0.0 && std::isfinite(c), "c must be > 0");
  const auto nd = static_cast<double>(n);
  const double mean = nd * jam_fraction(c);
  const double variance = nd * c / (2.0 * (1.0 + c) * (1.0 + c));
  return {mean, variance, mandel_q(mean, variance)};
}

/// Q of the conditional statistics; independent of n.
inline double conditional_mandel_q(double c) { return conditional_jam_stats(1, c).mandel_q; }

/// Unconditional statistics when the population is Poisson(rho V).
inline JamStats unconditional_jam_stats(double rho_v, double c) {
  detail::require(rho_v > 0.0 && std::isfinite(rho_v), "rhoV must be > 0");
  detail::require(c > 0.0 && std::isfinite(c), "c must be > 0");
  const double f_star = jam_fraction(c);
  const double mean = rho_v * f_star;
  const double variance = (c / (2.0 * (1.0 + c) * (1.0 + c)) + f_star * f_star) * rho_v;
  return {mean, variance, mandel_q(mean, variance)};
}

inline double unconditional_mandel_q(double c) { return unconditional_jam_stats(1.0, c).mandel_q; }

/// x(t) = ln(1 + c - c e^{-rate t}) / c.  t = +inf gives the jamming fraction.
inline double mean_excitation_curve(double c, double rate, double t) {
  detail::require(c > 0.0 && std::isfinite(c), "c must be > 0");
  detail::require(rate > 0.0 && std::isfinite(rate), "rate must be > 0");
  detail::require(t >= 0.0, "t must be >= 0");
  if (std::isinf(t)) return jam_fraction(c);
  const double saturation = -std::expm1(-rate * t);  // 1 - e^{-rate t}
  return std::log1p(c * saturation) / c;
}

/// Statistics after independent Bernoulli(efficiency) detection of every
/// excitation.
inline JamStats detector_transform(const JamStats& stats, const DetectorModel& det) {
  const double eta = det.efficiency;
  detail::require(detail::is_probability(eta), "efficiency must lie in [0, 1]");
  detail::require(stats.variance >= 0.0, "variance must be >= 0");
  JamStats out;
  out.mean = eta * stats.mean;
  out.variance = eta * eta * stats.variance + eta * (1.0 - eta) * stats.mean;
  out.mandel_q = eta * stats.mandel_q;
  return out;
}

/// Number of integer points (i, j) with i^2 + j^2 <= ratio^2, origin included.
inline std::int64_t lattice_neighbor_count(double radius_ratio) {
  detail::require(radius_ratio > 0.0 && std::isfinite(radius_ratio), "radius ratio must be > 0");
  const double r2 = radius_ratio * radius_ratio;
  const auto reach = static_cast<std::int64_t>(std::floor(radius_ratio));
  std::int64_t count = 0;
  for (std::int64_t i = -reach; i <= reach; ++i) {
    const double rest = r2 - static_cast<double>(i * i);
    auto j = static_cast<std::int64_t>(std::floor(std::sqrt(rest)));
    // sqrt may land one off near perfect squares
    while (static_cast<double>((j + 1) * (j + 1)) <= rest) ++j;
    while (j >= 0 && static_cast<double>(j * j) > rest) --j;
    if (j >= 0) count += 2 * j + 1;
  }
  return count;
}

/// Mean neighbor count c = rho V_b of a blockade geometry.
inline double neighbors_from_geometry(const BlockadeGeometry& geom) {
  detail::require(geom.radius > 0.0, "radius must be > 0");
  switch (geom.shape) {
    case BlockadeShape::sphere:
      detail::require(geom.density > 0.0, "density must be > 0");
      return 4.0 / 3.0 * std::numbers::pi * geom.density * geom.radius * geom.radius * geom.radius;
    case BlockadeShape::slab_cylinder:
      detail::require(geom.density > 0.0, "density must be > 0");
      detail::require(geom.thickness.has_value(), "slab cylinder requires a thickness");
      detail::require(*geom.thickness > 0.0, "thickness must be > 0");
      return std::numbers::pi * geom.density * geom.radius * geom.radius * *geom.thickness;
    case BlockadeShape::square_lattice:
      detail::require(geom.lattice_spacing.has_value(), "square lattice requires a lattice spacing");
      detail::require(*geom.lattice_spacing > 0.0, "lattice spacing must be > 0");
      return static_cast<double>(lattice_neighbor_count(geom.radius / *geom.lattice_spacing) - 1);
  }
  throw std::invalid_argument("unknown blockade shape");
}

/// Excitation volume implied by a detected jamming-limit mean:
/// V = c E[X_D] / (rho eta ln(1 + c)).
inline double excitation_volume(double detected_mean, double density, double efficiency, double c) {
  detail::require(detected_mean > 0.0, "detected mean must be > 0");
  detail::require(density > 0.0, "density must be > 0");
  detail::require(efficiency > 0.0 && efficiency <= 1.0, "efficiency must lie in (0, 1]");
  return detected_mean / (density * efficiency * jam_fraction(c));
}

}  // namespace jamming
