#include "kchemo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kchemo/errors.hpp"

namespace kchemo {

double VelocityGrid::max_speed() const noexcept {
  double m = 0.0;
  for (double v : nodes) m = std::max(m, std::abs(v));
  return m;
}

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "zero-inflow" || name == "zero_inflow") return Boundary::zero_inflow;
  throw ConfigError("unknown boundary '" + std::string(name) +
                    "' (expected periodic or zero-inflow)");
}

std::string_view to_string(Boundary b) noexcept {
  return b == Boundary::periodic ? "periodic" : "zero-inflow";
}

std::vector<double> SpatialGrid::centres() const {
  std::vector<double> x(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) x[i] = centre(i);
  return x;
}

VelocityGrid build_velocity_grid(std::size_t nv, double v_max) {
  if (nv < 2 || nv % 2 != 0) {
    throw ConfigError("velocity grid needs an even node count >= 2 to stay symmetric (got nv=" +
                      std::to_string(nv) + ")");
  }
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw ConfigError("velocity half-width v_max must be positive");
  }
  VelocityGrid g;
  g.v_max = v_max;
  const double h = 2.0 * v_max / static_cast<double>(nv);
  g.nodes.resize(nv);
  g.weights.assign(nv, h);
  // Fill the positive half and mirror it so that v_i = -v_{nv-1-i} bit for bit.
  const std::size_t half = nv / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double v = (static_cast<double>(k) + 0.5) * h;
    g.nodes[half + k] = v;
    g.nodes[half - 1 - k] = -v;
  }
  return g;
}

SpatialGrid build_spatial_grid(double x_min, double x_max, std::size_t n_cells, Boundary boundary) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw ConfigError("spatial domain needs x_max > x_min");
  }
  if (n_cells == 0) throw ConfigError("spatial grid needs at least one cell");
  SpatialGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_cells = n_cells;
  g.dx = (x_max - x_min) / static_cast<double>(n_cells);
  g.boundary = boundary;
  return g;
}

double integrate_v(std::span<const double> values, const VelocityGrid& grid) {
  if (values.size() != grid.size()) {
    throw ContractViolation("integrate_v: expected " + std::to_string(grid.size()) +
                            " values, got " + std::to_string(values.size()));
  }
  // Mirror pairs are added first so odd integrands cancel exactly.
  const std::size_t n = values.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t m = n - 1 - k;
    sum += values[k] * grid.weights[k] + values[m] * grid.weights[m];
  }
  if (n % 2 != 0) sum += values[n / 2] * grid.weights[n / 2];
  return sum;
}

double integrate_x(std::span<const double> field, const SpatialGrid& grid) {
  if (field.size() != grid.n_cells) {
    throw ContractViolation("integrate_x: expected " + std::to_string(grid.n_cells) +
                            " cells, got " + std::to_string(field.size()));
  }
  double sum = 0.0;
  for (double v : field) sum += v;
  return sum * grid.dx;
}

}  // namespace kchemo
