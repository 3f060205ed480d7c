#include <cmath>
#include <string>

#include "kchemo/errors.hpp"
#include "kchemo/kernels.hpp"
#include "kchemo/macro_fields.hpp"

namespace kchemo {

void SignalHistory::push(std::span<const double> rho_k, std::span<const double> z_k,
                         std::span<const double> s_k) {
  rho.emplace_back(rho_k.begin(), rho_k.end());
  z.emplace_back(z_k.begin(), z_k.end());
  s.emplace_back(s_k.begin(), s_k.end());
}

std::vector<double> s_oracle_duhamel(const SignalHistory& history, double t,
                                     const SpatialGrid& grid, ProductionMode mode,
                                     const ReceptorLaw& law) {
  if (grid.boundary != Boundary::periodic) {
    throw ContractViolation("Duhamel oracle is defined on periodic grids only");
  }
  if (!(history.dt > 0.0) || history.levels() == 0) {
    throw ContractViolation("Duhamel oracle needs a non-empty history with dt > 0");
  }
  const double steps = t / history.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(steps));
  if (t < 0.0 || std::abs(steps - static_cast<double>(n_steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ContractViolation("Duhamel oracle: t is not a multiple of the history step");
  }
  if (n_steps > history.levels() - 1) {
    throw ContractViolation("Duhamel oracle: history stops at level " +
                            std::to_string(history.levels() - 1) + ", need " +
                            std::to_string(n_steps));
  }
  const std::size_t n = grid.n_cells;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    if (history.s[k].size() != n || (k < n_steps && (history.rho[k].size() != n ||
                                                     history.z[k].size() != n))) {
      throw ContractViolation("Duhamel oracle: history level " + std::to_string(k) +
                              " does not match the grid");
    }
  }
  if (n_steps == 0) return history.s[0];

  std::vector<double> out(n, 0.0);
  kernels::circular_convolution_omp(periodic_heat_stencil(t, grid), history.s[0], 1.0, out);

  std::vector<double> source(n);
  for (std::size_t k = 0; k < n_steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = history.s[k][i];
      source[i] = production_eval(s, history.z[k][i], history.rho[k][i], mode, law) - s * s;
    }
    const double lag = static_cast<double>(n_steps - k) * history.dt;
    kernels::circular_convolution_omp(periodic_heat_stencil(lag, grid), source, history.dt, out);
  }
  return out;
}

}  // namespace kchemo
