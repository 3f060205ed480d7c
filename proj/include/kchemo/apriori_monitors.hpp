#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kchemo/grid.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

/// One monitored bound. margin = envelope - observed; pass iff margin >= -tolerance.
/// Informational entries are reported but never count as hard failures.
struct CheckEntry {
  std::string name;
  double observed = 0.0;
  double envelope = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool informational = false;
  std::string note;
};

CheckEntry make_check(std::string name, double observed, double envelope, double tolerance,
                      std::string note = {}, bool informational = false);

struct InvariantReport {
  double time = 0.0;
  std::vector<CheckEntry> checks;
  std::size_t clamp_events = 0;

  bool hard_failure() const noexcept;
};

/// Absolute slack plus a time-discretization allowance kappa * dt.
struct SlackPolicy {
  double absolute = 1e-8;
  double kappa = 0.0;
  double dt = 0.0;

  double value() const noexcept { return absolute + kappa * dt; }
};

/// Quantities of the initial data the envelopes are built from.
struct MonitorBaseline {
  double mass = 0.0;   ///< ||rho_0||_L1
  double n0 = 0.0;     ///< ||z_0 rho_0||_L1
  double z0_max = 0.0; ///< ||z_0||_inf
  double s0_l1 = 0.0;
  double s0_l2 = 0.0;
  double s0_linf = 0.0;
};

MonitorBaseline make_baseline(const MacroState& macro, const SpatialGrid& grid);

/// Coefficients a(t), b(t) sampled at t_k = k * step, k = 0..m, linear in between.
struct GronwallInputs {
  double y0 = 0.0;
  double step = 1.0;
  std::vector<double> a;
  std::vector<double> b;

  void validate() const;
  double horizon() const noexcept;
};

/// [(1 + y0) exp(∫_0^t (a + b) e^{-∫_0^τ a} dτ)]^{exp(∫_0^t a)} by nested
/// quadrature: exact integration of a, composite Simpson with `substeps`
/// panels per sample interval for the outer integral.
double gronwall_envelope(const GronwallInputs& inputs, double t, int substeps = 16);

/// Relative drift of the total mass. Under a zero-inflow boundary the entry is
/// informational since mass legitimately leaves the domain.
CheckEntry check_mass(double mass, double initial_mass, Boundary boundary,
                      double tolerance = 1e-10);

/// ||z rho||_L1 against e^{-t} (n0 + t sup_g ||rho_0||_L1).
CheckEntry check_n_decay(const MacroState& macro, const SpatialGrid& grid, double sup_g,
                         const MonitorBaseline& base, double t, const SlackPolicy& slack);

/// max z against e^{-t} ||z_0||_inf + sup_g (1 - e^{-t}).
CheckEntry check_z_bound(const MacroState& macro, double sup_g, const MonitorBaseline& base,
                         double t, const SlackPolicy& slack);

/// ||S||_{L^p} for p = 1, 2, inf against the scale 1 + ||rho_0||_L1 + ||S_0||_p.
/// The bounding constant is not explicit, so these entries are informational.
std::vector<CheckEntry> diagnose_signal_lp(const MacroState& macro, const SpatialGrid& grid,
                                           const MonitorBaseline& base);

struct GradientSample {
  double t = 0.0;
  double s_x_max = 0.0;
  double s_t_max = 0.0;
  double rho_l2 = 0.0;
};

struct GradientFit {
  double constant = 0.0;     ///< least-squares C in  y ~ C h(t)
  double growth = 0.0;       ///< change of y/h across the history (LS slope * span)
  bool super_envelope = false;
};

struct GradientDiagnostic {
  bool skipped = true;
  std::size_t points = 0;
  GradientFit s_x;
  GradientFit s_t;
};

/// Fits the logarithmic envelope shape h(t) = 1 + (ln t)_+ + (ln sup_{s<=t} ||rho(s)||_L2)_+
/// to the gradient norms. Needs at least three samples; diagnostic only.
GradientDiagnostic diagnose_gradient_logs(std::span<const GradientSample> history);

/// Turns a gradient diagnostic into informational report entries.
std::vector<CheckEntry> gradient_entries(const GradientDiagnostic& diag);

}  // namespace kchemo
