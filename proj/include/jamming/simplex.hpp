#pragma once

// Nelder-Mead downhill simplex (standard coefficients 1, 2, 1/2, 1/2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace jamming {

struct SimplexOptions {
  double initial_step = 0.5;
  double f_tolerance = 1e-15;  // relative spread of vertex values
  double x_tolerance = 1e-12;  // absolute simplex diameter
  std::size_t max_iterations = 20000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                 std::vector<double> start, const SimplexOptions& options = {}) {
  const std::size_t dim = start.size();
  if (dim == 0) {
    return {start, objective(start), 0, true};
  }
  std::vector<std::vector<double>> vertex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) vertex[i + 1][i] += options.initial_step;
  std::vector<double> value(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) value[i] = objective(vertex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  auto along = [&](double t, const std::vector<double>& worst) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + t * (worst[k] - centroid[k]);
    return x;
  };

  SimplexResult result;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) diameter = std::max(diameter, std::abs(vertex[i][k] - vertex[best][k]));
    const double spread = std::abs(value[worst] - value[best]);
    if (spread <= options.f_tolerance * (std::abs(value[best]) + 1e-300) || diameter <= options.x_tolerance) {
      result.converged = true;
      result.iterations = iter;
      break;
    }
    result.iterations = iter + 1;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += vertex[i][k] / static_cast<double>(dim);
    }

    const auto reflected = along(-1.0, vertex[worst]);
    const double f_reflected = objective(reflected);
    if (f_reflected < value[best]) {
      const auto expanded = along(-2.0, vertex[worst]);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < value[worst];
    const auto contracted = along(outside ? -0.5 : 0.5, vertex[worst]);
    const double f_contracted = objective(contracted);
    if (f_contracted < (outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k) vertex[i][k] = vertex[best][k] + 0.5 * (vertex[i][k] - vertex[best][k]);
      value[i] = objective(vertex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
  result.x = vertex[best];
  result.value = value[best];
  return result;
}

}  // namespace jamming
