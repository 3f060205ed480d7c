#pragma once

// Per-element bodies shared by the reference and OpenMP kernels.

#include <cstddef>
#include <span>

#include "kchemo/kernels.hpp"

namespace kchemo::kernels::detail {

inline double upwind_value(const TransportArgs& a, std::span<const double> f, std::size_t cell,
                           std::size_t k) {
  const std::size_t nv = a.nv;
  const double v = a.velocities[k];
  const double c = a.dt_over_dx * (v > 0.0 ? v : -v);
  const double here = f[cell * nv + k];
  double upstream = 0.0;
  if (v > 0.0) {
    if (cell > 0) {
      upstream = f[(cell - 1) * nv + k];
    } else if (a.boundary == Boundary::periodic) {
      upstream = f[(a.n_cells - 1) * nv + k];
    }
  } else {
    if (cell + 1 < a.n_cells) {
      upstream = f[(cell + 1) * nv + k];
    } else if (a.boundary == Boundary::periodic) {
      upstream = f[k];
    }
  }
  // Convex form: exact translation at unit Courant number.
  return (1.0 - c) * here + c * upstream;
}

inline void collide_cell(const CollisionArgs& a, std::span<const double> rates,
                         std::span<const double> f_in, std::span<double> f_out, std::size_t cell) {
  const std::size_t nv = a.nv;
  const double* f = f_in.data() + cell * nv;
  const double* r = rates.data() + cell * nv;
  double* out = f_out.data() + cell * nv;
  // Departing mass flux; post-turn velocities are uniform over V.
  double gain = 0.0;
  for (std::size_t k = 0; k < nv; ++k) gain += r[k] * f[k] * a.weights[k];
  for (std::size_t k = 0; k < nv; ++k) {
    out[k] = f[k] + a.dt * (gain - a.measure * r[k] * f[k]);
  }
}

inline void apply_matrix_cell(std::size_t nv, const double* m, double* f, double* scratch) {
  for (std::size_t r = 0; r < nv; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < nv; ++c) acc += m[r * nv + c] * f[c];
    scratch[r] = acc;
  }
  for (std::size_t r = 0; r < nv; ++r) f[r] = scratch[r];
}

inline double convolve_at(std::span<const double> kernel, std::span<const double> field,
                          std::size_t i) {
  const std::size_t n = field.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = i >= j ? i - j : i + n - j;
    acc += kernel[m] * field[j];
  }
  return acc;
}

}  // namespace kchemo::kernels::detail
