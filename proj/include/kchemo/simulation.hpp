#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kchemo/apriori_monitors.hpp"
#include "kchemo/config.hpp"
#include "kchemo/field_io.hpp"
#include "kchemo/grid.hpp"
#include "kchemo/hydro_limit.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

/// The coupled kinetic / internal-state / signal system on one grid.
/// Each step runs: moments, signal step, internal-state step, S_x refresh,
/// kinetic step with the kernel evaluated at the refreshed signal.
class CoupledSystem {
 public:
  explicit CoupledSystem(const SimConfig& config);

  const SimConfig& config() const noexcept { return config_; }
  const PhaseGrid& grid() const noexcept { return grid_; }
  const KineticState& kinetic() const noexcept { return f_; }
  const MacroState& macro() const noexcept { return macro_; }
  double time() const noexcept { return f_.t; }
  double rho_floor() const noexcept { return rho_floor_; }
  std::size_t clamp_events() const noexcept { return clamp_events_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt_min() const noexcept { return dt_min_; }
  double dt_max() const noexcept { return dt_max_; }

  /// Smallest of the transport, collision, internal-state and signal bounds
  /// evaluated at the current state.
  double admissible_dt() const;

  /// Advances by dt. Throws StepRejected naming the failing sub-step; the
  /// state is left untouched in that case.
  void step(double dt);

  /// Integrates to t_target. Fixed policy: steps of config.dt (the last one
  /// shortened). Automatic policy: cfl * admissible_dt capped by config.dt,
  /// retried with the reported admissible step when a sub-step rejects.
  void advance_to(double t_target);

 private:
  SimConfig config_;
  PhaseGrid grid_;
  KineticState f_;
  MacroState macro_;
  double rho_floor_ = 0.0;
  std::size_t clamp_events_ = 0;
  std::size_t steps_ = 0;
  double dt_min_ = 0.0;
  double dt_max_ = 0.0;
};

/// Discrete right-hand side S_xx + production - S - S^2 of the signal equation.
std::vector<double> signal_rhs(const MacroState& macro, const SimConfig& config,
                               const SpatialGrid& grid);

struct RunOptions {
  std::string out_dir;                 ///< empty: no files written
  std::optional<std::size_t> snapshots;  ///< overrides output.snapshots
};

struct RunSummary {
  std::string config_echo;
  double t_final = 0.0;
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double mass_relative_drift = 0.0;
  double rho_l1 = 0.0;
  double zrho_l1 = 0.0;
  double z_linf = 0.0;
  double s_l1 = 0.0;
  double s_l2 = 0.0;
  double s_linf = 0.0;
  std::size_t checks = 0;
  std::size_t passes = 0;
  std::size_t hard_failures = 0;
  std::size_t clamp_events = 0;
  double kappa = 0.0;
  bool kappa_estimated = false;
  std::optional<double> signal_order;  ///< observed dt-order of S from the pilot
  std::vector<InvariantReport> reports;
  std::vector<double> snapshot_times;
  double wall_seconds = 0.0;  ///< not serialized, so summaries stay reproducible

  bool hard_failure() const noexcept { return hard_failures > 0; }
};

struct KappaPilot {
  double kappa = 0.0;
  std::optional<double> signal_order;
};

/// Runs the coupled system over a short horizon at dt, dt/2 and dt/4 and
/// turns the spread of the monitored quantities into kappa.
KappaPilot estimate_kappa(const SimConfig& config);

RunSummary run_coupled(const SimConfig& config, const RunOptions& options = {});

/// Builds the monitor report for one snapshot.
InvariantReport monitor_snapshot(const MacroState& macro, const SpatialGrid& grid,
                                 const SimConfig& config, const MonitorBaseline& base, double t,
                                 const SlackPolicy& slack,
                                 const std::vector<GradientSample>& gradient_history);

/// Replays monitors over the fields_*.csv snapshots and summary.json in dir.
std::vector<InvariantReport> replay_invariants(const std::string& dir);

nlohmann::json to_json(const RunSummary& summary);

/// The sweep described by the config's grid, kernel, init.rho and sweep keys.
SweepResult run_sweep(const SimConfig& config);

}  // namespace kchemo
