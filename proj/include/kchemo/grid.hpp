#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kchemo {

/// Symmetric midpoint discretization of the velocity interval [-v_max, v_max].
/// Nodes are cell centres, so v = 0 is never a node.
struct VelocityGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double v_max = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Measure of the velocity set, |V| = 2 v_max.
  double measure() const noexcept { return 2.0 * v_max; }
  /// Largest characteristic speed actually present on the grid.
  double max_speed() const noexcept;
};

enum class Boundary { periodic, zero_inflow };

Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary b) noexcept;

struct SpatialGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  Boundary boundary = Boundary::periodic;

  double length() const noexcept { return x_max - x_min; }
  double centre(std::size_t i) const noexcept {
    return x_min + (static_cast<double>(i) + 0.5) * dx;
  }
  std::vector<double> centres() const;
};

struct PhaseGrid {
  SpatialGrid space;
  VelocityGrid velocity;

  std::size_t n_cells() const noexcept { return space.n_cells; }
  std::size_t nv() const noexcept { return velocity.size(); }
};

/// Throws ConfigError when nv is odd or below 2, or v_max is not positive.
VelocityGrid build_velocity_grid(std::size_t nv, double v_max);

/// Throws ConfigError for an empty or inverted interval or zero cells.
SpatialGrid build_spatial_grid(double x_min, double x_max, std::size_t n_cells,
                               Boundary boundary = Boundary::periodic);

/// Σ values_i w_i. Throws ContractViolation on a length mismatch.
double integrate_v(std::span<const double> values, const VelocityGrid& grid);

/// Σ field_j dx. Throws ContractViolation on a length mismatch.
double integrate_x(std::span<const double> field, const SpatialGrid& grid);

}  // namespace kchemo
