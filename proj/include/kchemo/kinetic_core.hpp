#pragma once

#include <cstddef>
#include <string_view>

#include "kchemo/grid.hpp"
#include "kchemo/signal_models.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

enum class Splitting { lie, strang };

Splitting parse_splitting(std::string_view name);
std::string_view to_string(Splitting s) noexcept;

/// rho = ∫ f dv and j = ∫ v f dv per cell.
Moments compute_moments(const KineticState& state, const PhaseGrid& grid);

/// ∫∫ f dv dx over the truncated domain.
double total_mass(const KineticState& state, const PhaseGrid& grid);

/// Largest dt accepted by the upwind transport: dx / max|v|.
double transport_dt_limit(const PhaseGrid& grid);

/// Largest dt keeping the explicit turning update nonnegative: 1 / lambda_max.
/// Returns +inf when every turning rate vanishes.
double collision_dt_limit(const MacroState& macro, const TurningKernelSpec& spec,
                          const PhaseGrid& grid);

/// Upwind transport f_t + v f_x = 0 over dt. Throws StepRejected when
/// dt max|v| / dx > 1.
KineticState transport_step(const KineticState& state, double dt, const PhaseGrid& grid);

struct CollisionStats {
  std::size_t clamp_events = 0;
  double lambda_max = 0.0;
};

/// Explicit Euler step of the gain-loss turning integral with T evaluated
/// from the cell's S_t and S_x. Throws StepRejected when dt lambda_max > 1.
KineticState collision_step(const KineticState& state, const MacroState& macro,
                            const TurningKernelSpec& spec, double dt, const PhaseGrid& grid,
                            CollisionStats* stats = nullptr);

/// One split step of the kinetic equation (Lie: transport then collision;
/// Strang: half transport, collision, half transport). Advances state.t.
KineticState step_kinetic(const KineticState& state, const MacroState& macro,
                          const TurningKernelSpec& spec, double dt, const PhaseGrid& grid,
                          Splitting splitting = Splitting::strang, CollisionStats* stats = nullptr);

/// Per-cell turning rates T(v_k) and clamp count for the given signal.
std::vector<double> turning_rates(const MacroState& macro, const TurningKernelSpec& spec,
                                  const PhaseGrid& grid, std::size_t* clamp_events = nullptr);

}  // namespace kchemo
