#pragma once

// Data-parallel inner loops. Every kernel has a serial `_reference` version
// and an OpenMP version computing the same per-element arithmetic, so the two
// agree bit for bit; tests compare them and bench/ times them.

#include <cstddef>
#include <span>

#include "kchemo/grid.hpp"

namespace kchemo::kernels {

/// First-order upwind transport of every velocity node over one step.
struct TransportArgs {
  std::size_t n_cells = 0;
  std::size_t nv = 0;
  std::span<const double> velocities;
  double dt_over_dx = 0.0;
  Boundary boundary = Boundary::periodic;
};

void upwind_transport_reference(const TransportArgs& args, std::span<const double> f_in,
                                std::span<double> f_out);
void upwind_transport_omp(const TransportArgs& args, std::span<const double> f_in,
                          std::span<double> f_out);

/// Explicit gain-loss turning update for kernels that depend on the departing
/// velocity only: rates[cell * nv + k] = T(v_k) in that cell.
struct CollisionArgs {
  std::size_t n_cells = 0;
  std::size_t nv = 0;
  std::span<const double> weights;
  double measure = 0.0;  ///< |V|
  double dt = 0.0;
};

void collision_reference(const CollisionArgs& args, std::span<const double> rates,
                         std::span<const double> f_in, std::span<double> f_out);
void collision_omp(const CollisionArgs& args, std::span<const double> rates,
                   std::span<const double> f_in, std::span<double> f_out);

/// f_cell <- M[index[cell]] f_cell with row-major nv x nv matrices.
void apply_cell_matrices_reference(std::size_t n_cells, std::size_t nv,
                                   std::span<const double> matrices,
                                   std::span<const std::size_t> index, std::span<double> f);
void apply_cell_matrices_omp(std::size_t n_cells, std::size_t nv, std::span<const double> matrices,
                             std::span<const std::size_t> index, std::span<double> f);

/// Circular convolution out[i] += scale * Σ_j kernel[(i - j) mod N] field[j].
void circular_convolution_reference(std::span<const double> kernel, std::span<const double> field,
                                    double scale, std::span<double> out);
void circular_convolution_omp(std::span<const double> kernel, std::span<const double> field,
                              double scale, std::span<double> out);

}  // namespace kchemo::kernels
