#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kchemo/grid.hpp"
#include "kchemo/kinetic_core.hpp"
#include "kchemo/signal_models.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

/// Discrete turning operator (A f)(v) = -lambda(v) f(v) + Σ_{v'} T(v', v) f(v') w_{v'}
/// for one frozen signal value.
struct TurningOperator {
  Eigen::MatrixXd matrix;
  std::vector<double> lambda;
  VelocityGrid grid;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// max_{v'} |Σ_v w_v A(v, v')| / lambda_max; zero up to round-off.
  double conservation_defect = 0.0;

  std::size_t size() const noexcept { return lambda.size(); }
  /// lambda_min <= 0: the null space may be trivial.
  bool degenerate() const noexcept { return !(lambda_min > 0.0); }
  std::vector<double> apply(std::span<const double> f) const;
};

/// Assembles Q from a dense T(v', v) (row = departing node).
TurningOperator assemble_q(std::span<const double> t_matrix, const VelocityGrid& grid);

/// Assembles Q from a kernel spec evaluated at the frozen signal.
TurningOperator assemble_q(const TurningKernelSpec& spec, const SignalSample& frozen,
                           const VelocityGrid& grid);

struct LambdaBoundViolation {
  std::size_t node = 0;
  double lambda = 0.0;
};

/// Nodes whose turning frequency leaves [lambda_1, lambda_2].
std::vector<LambdaBoundViolation> check_lambda_bounds(const TurningOperator& op, double lambda_1,
                                                      double lambda_2);

struct Equilibrium {
  std::vector<double> f;
  double drift = 0.0;     ///< σ = Σ v F w
  double residual = 0.0;  ///< ||A F||_inf
};

/// Unique normalized null vector of A from the bordered system. Throws
/// EquilibriumError for a degenerate operator, a null space that is not
/// one-dimensional, or entries below -1e-12.
Equilibrium compute_equilibrium(const TurningOperator& op);

struct QSolution {
  std::vector<double> f;
  double residual = 0.0;  ///< ||A f - phi||_inf
};

/// Solves Q(f) = phi with Σ f w = 0. Throws SolvabilityError when
/// Σ phi w differs from zero beyond round-off.
QSolution solve_q(const TurningOperator& op, std::span<const double> phi);

/// Conservative upwind solution of rho_t + (σ rho)_x = 0 up to t_end.
/// dt = 0 selects 0.5 dx / max|σ|; an explicit dt above dx / max|σ| is rejected.
std::vector<double> solve_limit(std::span<const double> rho0, std::span<const double> drift,
                                double t_end, const SpatialGrid& grid, double dt = 0.0);

/// Frozen signal per cell (or one value for every cell).
struct FrozenSignal {
  std::vector<SignalSample> cells;

  static FrozenSignal uniform(const SignalSample& s, std::size_t n_cells) {
    return FrozenSignal{std::vector<SignalSample>(n_cells, s)};
  }
};

/// Cell-wise operators, equilibria and exponentials shared by the scaled runs.
struct FrozenOperators {
  std::vector<TurningOperator> ops;
  std::vector<Equilibrium> equilibria;
  std::vector<std::size_t> index;  ///< operator index per cell
  double lambda_max = 0.0;
};

FrozenOperators build_frozen_operators(const TurningKernelSpec& spec, const FrozenSignal& signal,
                                       const VelocityGrid& grid);

struct ScaledRunOptions {
  double dt = 0.0;   ///< 0 selects min(cfl dx / v_max, eps / lambda_max)
  double cfl = 1.0;
  Splitting splitting = Splitting::strang;
};

/// Advances f_t + v f_x = Q(f) / eps to t_end, applying the turning part as
/// exp((dt/eps) A) per cell. Throws NotWellPrepared when f_I is not an
/// equilibrium (per cell ||A f||_inf > 1e-10 lambda_max max(1, ||f||_inf)).
KineticState run_scaled_kinetic(double eps, const KineticState& f_initial,
                                const FrozenOperators& frozen, double t_end,
                                const PhaseGrid& grid, const ScaledRunOptions& options = {});

/// f_I = rho_I(x) F(x, v).
KineticState well_prepared_state(std::span<const double> rho, const FrozenOperators& frozen,
                                 const PhaseGrid& grid);

/// Σ_{x,v} |f - g| dx w_v.
double l1_phase_distance(const KineticState& f, const KineticState& g, const PhaseGrid& grid);

struct SweepRow {
  double eps = 0.0;
  double error = 0.0;
};

struct PilotCheck {
  bool ran = false;
  std::size_t fine_cells = 0;
  double coarse_error = 0.0;
  double fine_error = 0.0;
  double discretization_estimate = 0.0;  ///< 2 |e_coarse - e_fine|
  bool passed = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> slope;  ///< empty when every error vanishes
  bool exact = false;
  bool monotone = true;         ///< e nonincreasing within 5%
  PilotCheck pilot;
  double dt_coarsest = 0.0;
};

struct SweepProblem {
  std::vector<double> eps;
  std::function<double(double)> rho_initial;
  std::function<SignalSample(double)> signal;
  TurningKernelSpec spec;
  double t_end = 1.0;
  ScaledRunOptions options;
  bool run_pilot = true;
};

/// Runs every eps, measures ||f_eps(T) - rho0(T) F||_L1 and fits the log-log
/// slope. Throws PilotCheckError when the pilot shows the resolution is too
/// coarse to resolve the smallest error.
SweepResult epsilon_sweep(const SweepProblem& problem, const PhaseGrid& grid);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kchemo
