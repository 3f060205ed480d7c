#include <omp.h>

#include <cstdint>
#include <vector>

#include "kchemo/kernels.hpp"
#include "kernel_ops.hpp"

namespace kchemo::kernels {

namespace {
// Below this many cells the fork/join overhead dominates.
constexpr std::int64_t kParallelCells = 64;
}  // namespace

void upwind_transport_omp(const TransportArgs& args, std::span<const double> f_in,
                          std::span<double> f_out) {
  const auto n = static_cast<std::int64_t>(args.n_cells);
#pragma omp parallel for schedule(static) if (n >= kParallelCells)
  for (std::int64_t cell = 0; cell < n; ++cell) {
    const auto c = static_cast<std::size_t>(cell);
    for (std::size_t k = 0; k < args.nv; ++k) {
      f_out[c * args.nv + k] = detail::upwind_value(args, f_in, c, k);
    }
  }
}

void collision_omp(const CollisionArgs& args, std::span<const double> rates,
                   std::span<const double> f_in, std::span<double> f_out) {
  const auto n = static_cast<std::int64_t>(args.n_cells);
#pragma omp parallel for schedule(static) if (n >= kParallelCells)
  for (std::int64_t cell = 0; cell < n; ++cell) {
    detail::collide_cell(args, rates, f_in, f_out, static_cast<std::size_t>(cell));
  }
}

void apply_cell_matrices_omp(std::size_t n_cells, std::size_t nv, std::span<const double> matrices,
                             std::span<const std::size_t> index, std::span<double> f) {
  const auto n = static_cast<std::int64_t>(n_cells);
#pragma omp parallel if (n >= kParallelCells)
  {
    std::vector<double> scratch(nv);
#pragma omp for schedule(static)
    for (std::int64_t cell = 0; cell < n; ++cell) {
      const auto c = static_cast<std::size_t>(cell);
      detail::apply_matrix_cell(nv, matrices.data() + index[c] * nv * nv, f.data() + c * nv,
                                scratch.data());
    }
  }
}

void circular_convolution_omp(std::span<const double> kernel, std::span<const double> field,
                              double scale, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(field.size());
#pragma omp parallel for schedule(static) if (n >= kParallelCells)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(i);
    out[c] += scale * detail::convolve_at(kernel, field, c);
  }
}

}  // namespace kchemo::kernels
