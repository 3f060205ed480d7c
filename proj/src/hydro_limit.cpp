#include "kchemo/hydro_limit.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

#include "kchemo/errors.hpp"
#include "kchemo/kernels.hpp"

namespace kchemo {

std::vector<double> TurningOperator::apply(std::span<const double> f) const {
  if (f.size() != size()) throw ContractViolation("TurningOperator::apply: size mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd y = matrix * x;
  return {y.data(), y.data() + y.size()};
}

TurningOperator assemble_q(std::span<const double> t_matrix, const VelocityGrid& grid) {
  const std::size_t nv = grid.size();
  if (t_matrix.size() != nv * nv) throw ContractViolation("assemble_q: T must be nv x nv");
  TurningOperator op;
  op.grid = grid;
  op.lambda.assign(nv, 0.0);
  op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  for (std::size_t from = 0; from < nv; ++from) {
    double out_rate = 0.0;
    for (std::size_t to = 0; to < nv; ++to) {
      const double rate = t_matrix[from * nv + to];
      if (rate < 0.0) throw ContractViolation("assemble_q: negative turning kernel entry");
      out_rate += rate * grid.weights[to];
      // Gain at `to` from `from`.
      op.matrix(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) +=
          rate * grid.weights[from];
    }
    op.lambda[from] = out_rate;
    op.matrix(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(from)) -= out_rate;
  }
  op.lambda_min = *std::min_element(op.lambda.begin(), op.lambda.end());
  op.lambda_max = *std::max_element(op.lambda.begin(), op.lambda.end());

  double defect = 0.0;
  for (std::size_t col = 0; col < nv; ++col) {
    double s = 0.0;
    for (std::size_t row = 0; row < nv; ++row) {
      s += grid.weights[row] *
           op.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }
    defect = std::max(defect, std::abs(s));
  }
  op.conservation_defect = op.lambda_max > 0.0 ? defect / op.lambda_max : defect;
  return op;
}

TurningOperator assemble_q(const TurningKernelSpec& spec, const SignalSample& frozen,
                           const VelocityGrid& grid) {
  return assemble_q(turning_matrix(spec, frozen.s_t, frozen.s_x, grid), grid);
}

std::vector<LambdaBoundViolation> check_lambda_bounds(const TurningOperator& op, double lambda_1,
                                                      double lambda_2) {
  std::vector<LambdaBoundViolation> out;
  for (std::size_t k = 0; k < op.size(); ++k) {
    if (op.lambda[k] < lambda_1 || op.lambda[k] > lambda_2) out.push_back({k, op.lambda[k]});
  }
  return out;
}

namespace {

// A with its last row replaced by the quadrature weights. Valid because
// w^T A = 0 makes every row a combination of the others.
Eigen::MatrixXd bordered(const TurningOperator& op) {
  Eigen::MatrixXd b = op.matrix;
  const auto last = b.rows() - 1;
  for (Eigen::Index c = 0; c < b.cols(); ++c) b(last, c) = op.grid.weights[static_cast<std::size_t>(c)];
  return b;
}

}  // namespace

Equilibrium compute_equilibrium(const TurningOperator& op) {
  if (op.degenerate()) {
    throw EquilibriumError("turning operator is degenerate (lambda_min = " +
                           std::to_string(op.lambda_min) + "); the null space may be trivial");
  }
  const auto nv = static_cast<Eigen::Index>(op.size());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(op.matrix);
  lu.setThreshold(1e-10);
  const auto rank = lu.rank();
  if (rank != nv - 1) {
    throw EquilibriumError("turning operator null space has dimension " +
                           std::to_string(nv - rank) +
                           "; a unique normalized equilibrium needs exactly one");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  rhs(nv - 1) = 1.0;
  const Eigen::VectorXd f = bordered(op).fullPivLu().solve(rhs);

  Equilibrium eq;
  eq.f.assign(f.data(), f.data() + f.size());
  for (double v : eq.f) {
    if (v < -1e-12) {
      throw EquilibriumError("equilibrium has a negative entry " + std::to_string(v));
    }
  }
  eq.residual = (op.matrix * f).cwiseAbs().maxCoeff();
  std::vector<double> vf(eq.f.size());
  for (std::size_t k = 0; k < vf.size(); ++k) vf[k] = op.grid.nodes[k] * eq.f[k];
  eq.drift = integrate_v(vf, op.grid);
  return eq;
}

QSolution solve_q(const TurningOperator& op, std::span<const double> phi) {
  const std::size_t nv = op.size();
  if (phi.size() != nv) throw ContractViolation("solve_q: right-hand side size mismatch");
  double mean = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    mean += phi[k] * op.grid.weights[k];
    scale += std::abs(phi[k]) * op.grid.weights[k];
  }
  if (std::abs(mean) > 1e-12 * std::max(scale, 1e-300)) {
    throw SolvabilityError("Q(f) = phi is solvable only for Σ phi w = 0 (got " +
                           std::to_string(mean) + ")");
  }
  const auto n = static_cast<Eigen::Index>(nv);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) rhs(k) = phi[static_cast<std::size_t>(k)];
  rhs(n - 1) = 0.0;
  const Eigen::VectorXd f = bordered(op).fullPivLu().solve(rhs);
  QSolution sol;
  sol.f.assign(f.data(), f.data() + f.size());
  const Eigen::Map<const Eigen::VectorXd> p(phi.data(), n);
  sol.residual = (op.matrix * f - p).cwiseAbs().maxCoeff();
  return sol;
}

std::vector<double> solve_limit(std::span<const double> rho0, std::span<const double> drift,
                                double t_end, const SpatialGrid& grid, double dt) {
  const std::size_t n = grid.n_cells;
  if (rho0.size() != n || drift.size() != n) {
    throw ContractViolation("solve_limit: fields do not match the grid");
  }
  if (t_end < 0.0) throw ContractViolation("solve_limit: negative end time");
  std::vector<double> rho(rho0.begin(), rho0.end());
  double peak = 0.0;
  for (double s : drift) peak = std::max(peak, std::abs(s));
  if (peak == 0.0 || t_end == 0.0) return rho;

  const double limit = grid.dx / peak;
  if (dt > limit * (1.0 + 1e-12)) throw StepRejected("limit-advection", dt, limit);
  if (dt <= 0.0) dt = 0.5 * limit;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
  dt = t_end / static_cast<double>(steps);

  const bool periodic = grid.boundary == Boundary::periodic;
  // Face i sits between cell i-1 and cell i; faces 0 and n coincide when periodic.
  std::vector<double> face_speed(n + 1);
  for (std::size_t f = 0; f <= n; ++f) {
    if (periodic) {
      const std::size_t left = (f + n - 1) % n, right = f % n;
      face_speed[f] = 0.5 * (drift[left] + drift[right]);
    } else {
      const std::size_t left = f == 0 ? 0 : f - 1, right = f == n ? n - 1 : f;
      face_speed[f] = 0.5 * (drift[left] + drift[right]);
    }
  }
  std::vector<double> flux(n + 1);
  const double ratio = dt / grid.dx;
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t f = 0; f <= n; ++f) {
      double left, right;
      if (periodic) {
        left = rho[(f + n - 1) % n];
        right = rho[f % n];
      } else {
        left = f == 0 ? 0.0 : rho[f - 1];
        right = f == n ? 0.0 : rho[f];
      }
      const double s = face_speed[f];
      flux[f] = s > 0.0 ? s * left : s * right;
    }
    if (periodic) flux[n] = flux[0];
    for (std::size_t i = 0; i < n; ++i) rho[i] -= ratio * (flux[i + 1] - flux[i]);
  }
  return rho;
}

FrozenOperators build_frozen_operators(const TurningKernelSpec& spec, const FrozenSignal& signal,
                                       const VelocityGrid& grid) {
  FrozenOperators out;
  out.index.resize(signal.cells.size());
  const SignalSample* previous = nullptr;
  for (std::size_t c = 0; c < signal.cells.size(); ++c) {
    const auto& s = signal.cells[c];
    // Consecutive identical signals share an operator.
    if (previous && previous->s == s.s && previous->s_x == s.s_x && previous->s_t == s.s_t) {
      out.index[c] = out.ops.size() - 1;
      continue;
    }
    out.ops.push_back(assemble_q(spec, s, grid));
    out.equilibria.push_back(compute_equilibrium(out.ops.back()));
    out.lambda_max = std::max(out.lambda_max, out.ops.back().lambda_max);
    out.index[c] = out.ops.size() - 1;
    previous = &s;
  }
  return out;
}

KineticState well_prepared_state(std::span<const double> rho, const FrozenOperators& frozen,
                                 const PhaseGrid& grid) {
  if (rho.size() != grid.n_cells() || frozen.index.size() != grid.n_cells()) {
    throw ContractViolation("well_prepared_state: fields do not match the grid");
  }
  KineticState f(grid);
  for (std::size_t c = 0; c < grid.n_cells(); ++c) {
    const auto& eq = frozen.equilibria[frozen.index[c]].f;
    for (std::size_t k = 0; k < grid.nv(); ++k) f.at(c, k) = rho[c] * eq[k];
  }
  return f;
}

KineticState run_scaled_kinetic(double eps, const KineticState& f_initial,
                                const FrozenOperators& frozen, double t_end,
                                const PhaseGrid& grid, const ScaledRunOptions& options) {
  if (!(eps > 0.0)) throw ContractViolation("run_scaled_kinetic: eps must be positive");
  if (t_end < 0.0) throw ContractViolation("run_scaled_kinetic: negative end time");
  const std::size_t n = grid.n_cells(), nv = grid.nv();
  if (f_initial.n_cells != n || f_initial.nv != nv || frozen.index.size() != n) {
    throw ContractViolation("run_scaled_kinetic: state or operators do not match the grid");
  }

  for (std::size_t c = 0; c < n; ++c) {
    const auto cell = f_initial.cell(c);
    const auto q = frozen.ops[frozen.index[c]].apply(cell);
    double qmax = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
      qmax = std::max(qmax, std::abs(q[k]));
      fmax = std::max(fmax, std::abs(cell[k]));
    }
    const double tol = 1e-10 * frozen.lambda_max * std::max(1.0, fmax);
    if (qmax > tol) throw NotWellPrepared(qmax, tol);
  }

  KineticState f = f_initial;
  if (t_end == 0.0) return f;

  const double transport_limit = transport_dt_limit(grid);
  const double stiff_limit = frozen.lambda_max > 0.0 ? eps / frozen.lambda_max : t_end;
  double dt = options.dt;
  if (dt > 0.0) {
    if (dt > transport_limit * (1.0 + 1e-12)) throw StepRejected("transport", dt, transport_limit);
    if (dt > stiff_limit * (1.0 + 1e-12)) throw StepRejected("stiff-collision", dt, stiff_limit);
  } else {
    dt = std::min(options.cfl * grid.space.dx / grid.velocity.v_max, stiff_limit);
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
  dt = t_end / static_cast<double>(steps);

  std::vector<double> exps(frozen.ops.size() * nv * nv);
  for (std::size_t o = 0; o < frozen.ops.size(); ++o) {
    const Eigen::MatrixXd e = (frozen.ops[o].matrix * (dt / eps)).exp();
    for (std::size_t r = 0; r < nv; ++r) {
      for (std::size_t c = 0; c < nv; ++c) {
        exps[(o * nv + r) * nv + c] =
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }

  const bool strang = options.splitting == Splitting::strang;
  const double sub = strang ? 0.5 * dt : dt;
  kernels::TransportArgs args{n, nv, grid.velocity.nodes, sub / grid.space.dx,
                              grid.space.boundary};
  std::vector<double> scratch(f.f.size());
  for (std::size_t step = 0; step < steps; ++step) {
    kernels::upwind_transport_omp(args, f.f, scratch);
    f.f.swap(scratch);
    kernels::apply_cell_matrices_omp(n, nv, exps, frozen.index, f.f);
    if (strang) {
      kernels::upwind_transport_omp(args, f.f, scratch);
      f.f.swap(scratch);
    }
  }
  f.t = f_initial.t + t_end;
  return f;
}

double l1_phase_distance(const KineticState& f, const KineticState& g, const PhaseGrid& grid) {
  if (f.f.size() != g.f.size()) throw ContractViolation("l1_phase_distance: size mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < f.n_cells; ++c) {
    for (std::size_t k = 0; k < f.nv; ++k) {
      sum += std::abs(f.at(c, k) - g.at(c, k)) * grid.velocity.weights[k];
    }
  }
  return sum * grid.space.dx;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

namespace {

struct SweepSetup {
  FrozenOperators frozen;
  KineticState initial;
  KineticState limit;  // rho0(T) F
  double mass = 0.0;
};

SweepSetup prepare_sweep(const SweepProblem& p, const PhaseGrid& grid) {
  const std::size_t n = grid.n_cells();
  FrozenSignal signal;
  std::vector<double> rho(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double x = grid.space.centre(c);
    signal.cells.push_back(p.signal(x));
    rho[c] = p.rho_initial(x);
    if (!(rho[c] >= 0.0)) throw ConfigError("sweep initial density must be nonnegative");
  }
  SweepSetup s;
  s.frozen = build_frozen_operators(p.spec, signal, grid.velocity);
  s.initial = well_prepared_state(rho, s.frozen, grid);
  std::vector<double> drift(n);
  for (std::size_t c = 0; c < n; ++c) drift[c] = s.frozen.equilibria[s.frozen.index[c]].drift;
  const auto rho_t = solve_limit(rho, drift, p.t_end, grid.space);
  s.limit = well_prepared_state(rho_t, s.frozen, grid);
  s.mass = integrate_x(rho, grid.space);
  return s;
}

double sweep_error(const SweepSetup& s, double eps, const SweepProblem& p, const PhaseGrid& grid) {
  const auto f = run_scaled_kinetic(eps, s.initial, s.frozen, p.t_end, grid, p.options);
  return l1_phase_distance(f, s.limit, grid);
}

}  // namespace

SweepResult epsilon_sweep(const SweepProblem& p, const PhaseGrid& grid) {
  if (p.eps.size() < 3) throw ConfigError("epsilon sweep needs at least three values");
  for (std::size_t k = 0; k < p.eps.size(); ++k) {
    if (!(p.eps[k] > 0.0)) throw ConfigError("epsilon values must be positive");
    if (k > 0 && !(p.eps[k] < p.eps[k - 1])) {
      throw ConfigError("epsilon values must be strictly decreasing");
    }
  }
  if (!p.rho_initial || !p.signal) throw ContractViolation("epsilon sweep: missing profiles");

  SweepResult result;
  const auto setup = prepare_sweep(p, grid);
  result.dt_coarsest = std::min(p.options.cfl * grid.space.dx / grid.velocity.v_max,
                                p.eps.front() / std::max(setup.frozen.lambda_max, 1e-300));

  // Errors below this are round-off: the data is a global equilibrium.
  const double exact_floor = 1e-12 * std::max(setup.mass, 1e-300);
  std::vector<double> errors;
  for (double eps : p.eps) {
    const double e = sweep_error(setup, eps, p, grid);
    result.rows.push_back({eps, e});
    errors.push_back(e);
  }
  result.exact = std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= exact_floor; });
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] > 1.05 * errors[k - 1]) result.monotone = false;
  }
  if (!result.exact) {
    if (std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > 0.0); })) {
      result.slope.reset();
    } else {
      result.slope = log_log_slope(p.eps, errors);
    }
  }

  if (p.run_pilot && !result.exact) {
    PhaseGrid fine = grid;
    fine.space = build_spatial_grid(grid.space.x_min, grid.space.x_max, 2 * grid.n_cells(),
                                    grid.space.boundary);
    const auto fine_setup = prepare_sweep(p, fine);
    auto& pilot = result.pilot;
    pilot.ran = true;
    pilot.fine_cells = fine.n_cells();
    pilot.coarse_error = errors.back();
    pilot.fine_error = sweep_error(fine_setup, p.eps.back(), p, fine);
    pilot.discretization_estimate = 2.0 * std::abs(pilot.coarse_error - pilot.fine_error);
    pilot.passed = pilot.discretization_estimate < pilot.coarse_error;
    if (!pilot.passed) {
      throw PilotCheckError("resolution pilot failed: discretization error estimate " +
                            std::to_string(pilot.discretization_estimate) +
                            " is not below the smallest sweep error " +
                            std::to_string(pilot.coarse_error) + " at " +
                            std::to_string(grid.n_cells()) + " cells");
    }
  }
  return result;
}

}  // namespace kchemo
