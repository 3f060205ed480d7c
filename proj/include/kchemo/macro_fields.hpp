#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kchemo/grid.hpp"
#include "kchemo/signal_models.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

/// One step of z_t + (j/rho) z_x = g(S) - z: semi-Lagrangian transport along
/// Lambda = j / max(rho, rho_floor) followed by exact relaxation toward g(S).
/// Cells with rho < rho_floor only relax. Uses macro.s as the signal.
std::vector<double> z_step(const MacroState& macro, const ReceptorLaw& law, double dt,
                           const SpatialGrid& grid, double rho_floor);

struct SignalUpdate {
  std::vector<double> s;
  std::vector<double> s_t;
};

/// IMEX step of S_t = S_xx + production - S - S^2: diffusion and linear decay
/// implicit, production and -S^2 explicit. Throws StepRejected if the new S
/// has a negative entry, reporting signal_dt_limit as the admissible step.
SignalUpdate s_step_fd(const MacroState& macro, ProductionMode mode, const ReceptorLaw& law,
                       double dt, const SpatialGrid& grid);

/// Sufficient step bound for S >= 0: min over cells of S / (S^2 - production)
/// where that denominator is positive; +inf if none.
double signal_dt_limit(const MacroState& macro, ProductionMode mode, const ReceptorLaw& law);

/// Central difference (S_{i+1} - S_{i-1}) / (2 dx); zero ghosts outside a
/// non-periodic domain.
std::vector<double> central_gradient(std::span<const double> s, const SpatialGrid& grid);

/// Fundamental solution of d_t - d_xx + 1 on the line.
double heat_kernel(double t, double x);

/// Midpoint quadrature of the heat kernel centred at x = 0 over the grid.
/// Throws DomainError for t <= 0 or when the Gaussian tail outside the
/// domain exceeds 1e-12.
double heat_kernel_l1(double t, const SpatialGrid& grid);

/// Convolution stencil of the heat kernel at time t on a periodic grid:
/// stencil[m] is the integral of the wrapped kernel over the cell at offset
/// m dx, so (Gamma(t) * u)(x_i) = Σ_j stencil[(i-j) mod N] u_j.
std::vector<double> periodic_heat_stencil(double t, const SpatialGrid& grid);

/// Stored (rho, z, S) at t_k = k dt, k = 0..n, taken at the start of each step.
struct SignalHistory {
  double dt = 0.0;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> s;

  std::size_t levels() const noexcept { return s.size(); }
  void push(std::span<const double> rho_k, std::span<const double> z_k,
            std::span<const double> s_k);
};

/// Evaluates S(t) from the Duhamel representation
///   S(t) = Gamma(t) * S_0 + ∫_0^t Gamma(s) * [production - S^2](t - s) ds
/// using the stored history for the source and a left-rectangle rule in s.
/// t must be a multiple of history.dt covered by the history.
std::vector<double> s_oracle_duhamel(const SignalHistory& history, double t,
                                     const SpatialGrid& grid, ProductionMode mode,
                                     const ReceptorLaw& law);

}  // namespace kchemo
