#include <vector>

#include "kchemo/kernels.hpp"
#include "kernel_ops.hpp"

namespace kchemo::kernels {

void upwind_transport_reference(const TransportArgs& args, std::span<const double> f_in,
                                std::span<double> f_out) {
  for (std::size_t cell = 0; cell < args.n_cells; ++cell) {
    for (std::size_t k = 0; k < args.nv; ++k) {
      f_out[cell * args.nv + k] = detail::upwind_value(args, f_in, cell, k);
    }
  }
}

void collision_reference(const CollisionArgs& args, std::span<const double> rates,
                         std::span<const double> f_in, std::span<double> f_out) {
  for (std::size_t cell = 0; cell < args.n_cells; ++cell) {
    detail::collide_cell(args, rates, f_in, f_out, cell);
  }
}

void apply_cell_matrices_reference(std::size_t n_cells, std::size_t nv,
                                   std::span<const double> matrices,
                                   std::span<const std::size_t> index, std::span<double> f) {
  std::vector<double> scratch(nv);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    detail::apply_matrix_cell(nv, matrices.data() + index[cell] * nv * nv, f.data() + cell * nv,
                              scratch.data());
  }
}

void circular_convolution_reference(std::span<const double> kernel, std::span<const double> field,
                                    double scale, std::span<double> out) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    out[i] += scale * detail::convolve_at(kernel, field, i);
  }
}

}  // namespace kchemo::kernels
