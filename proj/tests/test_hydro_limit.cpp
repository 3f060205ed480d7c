#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kchemo/errors.hpp"
#include "kchemo/hydro_limit.hpp"

using namespace kchemo;

namespace {

TurningKernelSpec constant_kernel(double lambda0) {
  TurningKernelSpec s;
  s.lambda0 = lambda0;
  return s;
}

// T(v', v) = lambda0 K(v) with K ∝ 1 + v / v_max, normalised so Σ K w = 1.
std::vector<double> separable_biased(const VelocityGrid& g, double lambda0, std::vector<double>* k) {
  const std::size_t nv = g.size();
  k->assign(nv, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    (*k)[i] = 1.0 + g.nodes[i] / g.v_max;
    norm += (*k)[i] * g.weights[i];
  }
  for (double& v : *k) v /= norm;
  std::vector<double> t(nv * nv);
  for (std::size_t from = 0; from < nv; ++from) {
    for (std::size_t to = 0; to < nv; ++to) t[from * nv + to] = lambda0 * (*k)[to];
  }
  return t;
}

}  // namespace

TEST_CASE("assemble_q: two-node hand assembly") {
  const auto g = build_velocity_grid(2, 1.0);  // weights 1
  const auto op = assemble_q(constant_kernel(1.0), SignalSample{}, g);
  CHECK(op.lambda[0] == 2.0);
  CHECK(op.lambda[1] == 2.0);
  const std::vector<double> f{3.0, 5.0};
  const auto af = op.apply(f);
  CHECK(af[0] == doctest::Approx(2.0));
  CHECK(af[1] == doctest::Approx(-2.0));
  CHECK(op.conservation_defect < 1e-15);
}

TEST_CASE("assemble_q: Σ (A f) w = 0 for random kernels and states") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nv = 2 * (1 + trial % 8);
    const auto g = build_velocity_grid(nv, 0.5 + u(rng));
    std::vector<double> t(nv * nv), f(nv);
    for (auto& x : t) x = u(rng);
    for (auto& x : f) x = u(rng) - 1.0;
    const auto op = assemble_q(t, g);
    const auto af = op.apply(f);
    double s = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
      s += af[k] * g.weights[k];
      scale += std::abs(af[k]) * g.weights[k];
    }
    CHECK(std::abs(s) <= 1e-13 * std::max(1.0, scale));
  }
}

TEST_CASE("assemble_q: zero kernel is degenerate") {
  const auto g = build_velocity_grid(4, 1.0);
  const auto op = assemble_q(std::vector<double>(16, 0.0), g);
  CHECK(op.degenerate());
  CHECK_THROWS_AS(compute_equilibrium(op), EquilibriumError);
  CHECK(check_lambda_bounds(op, 0.1, 10.0).size() == 4);
}

TEST_CASE("lambda bounds are reported per node") {
  const auto g = build_velocity_grid(4, 1.0);
  TurningKernelSpec lin;
  lin.kind = KernelKind::linear_temporal;
  lin.lambda0 = 1.0;
  lin.sigma = 1.0;
  const auto op = assemble_q(lin, SignalSample{0.0, 1.0, 0.0}, g);
  // T(v) = 1 + v, lambda = 2 T.
  const auto bad = check_lambda_bounds(op, 1.0, 3.0);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0].node == 0);
  CHECK(bad[1].node == 3);
}

TEST_CASE("equilibrium: constant kernel is uniform with zero drift") {
  for (std::size_t nv : {2u, 8u, 32u}) {
    const auto g = build_velocity_grid(nv, 1.0);
    const auto eq = compute_equilibrium(assemble_q(constant_kernel(0.7), SignalSample{}, g));
    for (double f : eq.f) CHECK(std::abs(f - 0.5) < 1e-12);
    CHECK(std::abs(eq.drift) < 1e-12);
    CHECK(eq.residual < 1e-12);
  }
}

TEST_CASE("equilibrium: separable biased kernel gives F = K and positive drift") {
  const auto g = build_velocity_grid(16, 1.0);
  std::vector<double> k;
  const auto op = assemble_q(separable_biased(g, 1.3, &k), g);
  const auto eq = compute_equilibrium(op);
  double mass = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(eq.f[i] == doctest::Approx(k[i]).epsilon(1e-12));
    CHECK(eq.f[i] >= 0.0);
    mass += eq.f[i] * g.weights[i];
    drift += g.nodes[i] * k[i] * g.weights[i];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eq.residual <= 1e-10);
  CHECK(eq.drift == doctest::Approx(drift).epsilon(1e-12));
  // Σ v (1 + v) w / 2 on the 16-node grid: half the discrete second moment.
  CHECK(eq.drift > 0.3);
  CHECK(eq.drift < 1.0 / 3.0);
}

TEST_CASE("equilibrium: the velocity-dependent kernels give positive F") {
  const auto g = build_velocity_grid(12, 1.0);
  TurningKernelSpec phi;
  phi.kind = KernelKind::monotone_phi;
  const auto eq = compute_equilibrium(assemble_q(phi, SignalSample{0.3, 2.0, -0.5}, g));
  for (double f : eq.f) CHECK(f > 0.0);
  // Fewer turns when running up the gradient gives positive drift.
  CHECK(eq.drift > 0.0);
}

TEST_CASE("equilibrium: a reducible operator is ambiguous") {
  // Two decoupled velocity blocks: the null space is two-dimensional.
  const auto g = build_velocity_grid(4, 1.0);
  std::vector<double> t(16, 0.0);
  t[0 * 4 + 1] = t[1 * 4 + 0] = 1.0;
  t[2 * 4 + 3] = t[3 * 4 + 2] = 1.0;
  CHECK_THROWS_AS(compute_equilibrium(assemble_q(t, g)), EquilibriumError);
}

TEST_CASE("solvability: mean-zero right-hand sides solve, others are rejected") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.1, 2.0), s(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nv = 2 * (1 + trial % 5);
    const auto g = build_velocity_grid(nv, 1.0);
    std::vector<double> t(nv * nv);
    for (auto& x : t) x = u(rng);
    const auto op = assemble_q(t, g);
    std::vector<double> phi(nv);
    double mean = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
      phi[k] = s(rng);
      mean += phi[k] * g.weights[k];
    }
    for (auto& p : phi) p -= mean / g.measure();
    const auto sol = solve_q(op, phi);
    CHECK(sol.residual <= 1e-10);
    double fmass = 0.0;
    for (std::size_t k = 0; k < nv; ++k) fmass += sol.f[k] * g.weights[k];
    CHECK(std::abs(fmass) < 1e-12);
    phi[0] += 0.5;
    CHECK_THROWS_AS(solve_q(op, phi), SolvabilityError);
  }
}

TEST_CASE("solve_limit: zero drift, translation and conservation") {
  const auto g = build_spatial_grid(0.0, 1.0, 200, Boundary::periodic);
  std::vector<double> rho(200);
  for (std::size_t i = 0; i < 200; ++i) rho[i] = 1.0 + std::sin(2.0 * std::numbers::pi * g.centre(i));
  CHECK(solve_limit(rho, std::vector<double>(200, 0.0), 3.0, g) == rho);

  const double c = 0.4, t = 0.5;
  const auto out = solve_limit(rho, std::vector<double>(200, c), t, g);
  double err = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const double exact = 1.0 + std::sin(2.0 * std::numbers::pi * (g.centre(i) - c * t));
    err = std::max(err, std::abs(out[i] - exact));
  }
  CHECK(err < 0.05);  // first-order numerical diffusion
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    m0 += rho[i];
    m1 += out[i];
  }
  CHECK(std::abs(m1 - m0) / m0 < 1e-12);

  std::vector<double> varying(200);
  for (std::size_t i = 0; i < 200; ++i) varying[i] = std::cos(2.0 * std::numbers::pi * g.centre(i));
  const auto mixed = solve_limit(rho, varying, 1.0, g);
  double m2 = 0.0;
  for (double r : mixed) m2 += r;
  CHECK(std::abs(m2 - m0) / m0 < 1e-12);
  CHECK_THROWS_AS(solve_limit(rho, std::vector<double>(200, 1.0), 1.0, g, 2.0 * g.dx),
                  StepRejected);
}

TEST_CASE("run_scaled_kinetic: global equilibrium is a fixed point") {
  const PhaseGrid grid{build_spatial_grid(-1.0, 1.0, 32, Boundary::periodic),
                       build_velocity_grid(8, 1.0)};
  TurningKernelSpec phi;
  phi.kind = KernelKind::monotone_phi;
  const auto frozen = build_frozen_operators(phi, FrozenSignal::uniform({0.0, 0.0, 0.0}, 32),
                                             grid.velocity);
  const std::vector<double> rho(32, 1.7);
  const auto f0 = well_prepared_state(rho, frozen, grid);
  for (double eps : {1.0, 0.01}) {
    const auto f = run_scaled_kinetic(eps, f0, frozen, 1.0, grid);
    CHECK(l1_phase_distance(f, f0, grid) < 1e-12);
  }
  CHECK(run_scaled_kinetic(0.5, f0, frozen, 0.0, grid).f == f0.f);
}

TEST_CASE("run_scaled_kinetic: rejects data off equilibrium and conserves mass") {
  const PhaseGrid grid{build_spatial_grid(-1.0, 1.0, 64, Boundary::periodic),
                       build_velocity_grid(4, 1.0)};
  const auto frozen = build_frozen_operators(constant_kernel(1.0),
                                             FrozenSignal::uniform({}, 64), grid.velocity);
  KineticState off(grid, 1.0);
  off.at(3, 0) = 2.0;
  CHECK_THROWS_AS(run_scaled_kinetic(0.1, off, frozen, 1.0, grid), NotWellPrepared);

  std::vector<double> rho(64);
  for (std::size_t i = 0; i < 64; ++i) rho[i] = std::exp(-10.0 * grid.space.centre(i) * grid.space.centre(i));
  const auto f0 = well_prepared_state(rho, frozen, grid);
  const auto f = run_scaled_kinetic(0.05, f0, frozen, 0.5, grid);
  const double m0 = total_mass(f0, grid), m1 = total_mass(f, grid);
  CHECK(std::abs(m1 - m0) / m0 < 1e-12);
  for (double v : f.f) CHECK(v >= -1e-15);

  ScaledRunOptions too_big;
  too_big.dt = 0.5;
  CHECK_THROWS_AS(run_scaled_kinetic(0.05, f0, frozen, 0.5, grid, too_big), StepRejected);
}

TEST_CASE("constant kernel relaxes at rate lambda0 |V|") {
  const auto g = build_velocity_grid(2, 1.0);
  const auto op = assemble_q(constant_kernel(0.6), SignalSample{}, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.6 * g.measure()));
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-14);
}

TEST_CASE("epsilon sweep: exact on global equilibria and input validation") {
  const PhaseGrid grid{build_spatial_grid(-1.0, 1.0, 32, Boundary::periodic),
                       build_velocity_grid(8, 1.0)};
  SweepProblem p;
  p.eps = {0.2, 0.1, 0.05};
  p.rho_initial = [](double) { return 1.0; };
  p.signal = [](double) { return SignalSample{}; };
  p.spec = constant_kernel(1.0);
  const auto r = epsilon_sweep(p, grid);
  CHECK(r.exact);
  CHECK_FALSE(r.slope.has_value());
  for (const auto& row : r.rows) CHECK(row.error < 1e-12);

  p.eps = {0.2, 0.1};
  CHECK_THROWS_AS(epsilon_sweep(p, grid), ConfigError);
  p.eps = {0.2, 0.1, 0.1};
  CHECK_THROWS_AS(epsilon_sweep(p, grid), ConfigError);
}

TEST_CASE("epsilon sweep: pilot refuses an under-resolved grid") {
  const PhaseGrid grid{build_spatial_grid(-4.0, 4.0, 16, Boundary::periodic),
                       build_velocity_grid(8, 1.0)};
  SweepProblem p;
  p.eps = {0.2, 0.1, 0.05, 0.025};
  p.rho_initial = [](double x) { return std::exp(-x * x / 0.02); };
  p.signal = [](double) { return SignalSample{}; };
  p.spec = constant_kernel(0.5);
  CHECK_THROWS_AS(epsilon_sweep(p, grid), PilotCheckError);
}

TEST_CASE("log-log slope of a power law") {
  const std::vector<double> x{0.2, 0.1, 0.05}, y{0.4, 0.1, 0.025};
  CHECK(log_log_slope(x, y) == doctest::Approx(2.0));
}
