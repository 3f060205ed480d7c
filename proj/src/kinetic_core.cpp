#include "kchemo/kinetic_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kchemo/errors.hpp"
#include "kchemo/kernels.hpp"

namespace kchemo {

namespace {

// Relative slack on stability limits so that dt computed as exactly the
// limit is not refused because of rounding.
constexpr double kLimitSlack = 1e-12;

}  // namespace

Splitting parse_splitting(std::string_view name) {
  if (name == "strang") return Splitting::strang;
  if (name == "lie") return Splitting::lie;
  throw ConfigError("unknown splitting '" + std::string(name) + "' (expected strang or lie)");
}

std::string_view to_string(Splitting s) noexcept {
  return s == Splitting::strang ? "strang" : "lie";
}

Moments compute_moments(const KineticState& state, const PhaseGrid& grid) {
  const auto& vg = grid.velocity;
  Moments m;
  m.rho.resize(state.n_cells);
  m.j.resize(state.n_cells);
  std::vector<double> vf(state.nv);
  for (std::size_t c = 0; c < state.n_cells; ++c) {
    const auto fc = state.cell(c);
    for (std::size_t k = 0; k < state.nv; ++k) vf[k] = vg.nodes[k] * fc[k];
    m.rho[c] = integrate_v(fc, vg);
    m.j[c] = integrate_v(vf, vg);
  }
  return m;
}

double total_mass(const KineticState& state, const PhaseGrid& grid) {
  return integrate_x(compute_moments(state, grid).rho, grid.space);
}

double transport_dt_limit(const PhaseGrid& grid) {
  return grid.space.dx / grid.velocity.max_speed();
}

std::vector<double> turning_rates(const MacroState& macro, const TurningKernelSpec& spec,
                                  const PhaseGrid& grid, std::size_t* clamp_events) {
  const std::size_t n = grid.n_cells();
  const std::size_t nv = grid.nv();
  if (macro.s_t.size() != n || macro.s_x.size() != n) {
    throw ContractViolation("turning_rates: signal gradients do not match the grid");
  }
  std::vector<double> rates(n * nv);
  std::size_t clamps = 0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < nv; ++k) {
      const auto kv = kernel_eval(spec, macro.s_t[c], macro.s_x[c], grid.velocity.nodes[k]);
      rates[c * nv + k] = kv.rate;
      clamps += kv.clamped ? 1 : 0;
    }
  }
  if (clamp_events) *clamp_events = clamps;
  return rates;
}

double collision_dt_limit(const MacroState& macro, const TurningKernelSpec& spec,
                          const PhaseGrid& grid) {
  const auto rates = turning_rates(macro, spec, grid);
  const double peak = rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
  const double lambda_max = grid.velocity.measure() * peak;
  return lambda_max > 0.0 ? 1.0 / lambda_max : std::numeric_limits<double>::infinity();
}

KineticState transport_step(const KineticState& state, double dt, const PhaseGrid& grid) {
  const double limit = transport_dt_limit(grid);
  if (dt < 0.0) throw ContractViolation("transport_step: negative dt");
  if (dt > limit * (1.0 + kLimitSlack)) throw StepRejected("transport", dt, limit);
  KineticState out = state;
  if (dt == 0.0) return out;
  kernels::TransportArgs args{state.n_cells, state.nv, grid.velocity.nodes, dt / grid.space.dx,
                              grid.space.boundary};
  kernels::upwind_transport_omp(args, state.f, out.f);
  return out;
}

KineticState collision_step(const KineticState& state, const MacroState& macro,
                            const TurningKernelSpec& spec, double dt, const PhaseGrid& grid,
                            CollisionStats* stats) {
  if (dt < 0.0) throw ContractViolation("collision_step: negative dt");
  std::size_t clamps = 0;
  const auto rates = turning_rates(macro, spec, grid, &clamps);
  const double peak = rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
  const double lambda_max = grid.velocity.measure() * peak;
  if (dt * lambda_max > 1.0 + kLimitSlack) {
    throw StepRejected("collision", dt, 1.0 / lambda_max);
  }
  if (stats) {
    stats->clamp_events += clamps;
    stats->lambda_max = std::max(stats->lambda_max, lambda_max);
  }
  KineticState out = state;
  if (dt == 0.0) return out;
  kernels::CollisionArgs args{state.n_cells, state.nv, grid.velocity.weights,
                              grid.velocity.measure(), dt};
  kernels::collision_omp(args, rates, state.f, out.f);
  return out;
}

KineticState step_kinetic(const KineticState& state, const MacroState& macro,
                          const TurningKernelSpec& spec, double dt, const PhaseGrid& grid,
                          Splitting splitting, CollisionStats* stats) {
  if (dt == 0.0) return state;
  // Both sub-step limits are checked up front so a rejection leaves no partial work.
  const double t_limit = transport_dt_limit(grid);
  if (dt > t_limit * (1.0 + kLimitSlack)) throw StepRejected("transport", dt, t_limit);
  KineticState out;
  if (splitting == Splitting::lie) {
    out = transport_step(state, dt, grid);
    out = collision_step(out, macro, spec, dt, grid, stats);
  } else {
    out = transport_step(state, 0.5 * dt, grid);
    out = collision_step(out, macro, spec, dt, grid, stats);
    out = transport_step(out, 0.5 * dt, grid);
  }
  out.t = state.t + dt;
  return out;
}

}  // namespace kchemo
