#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kchemo/errors.hpp"
#include "kchemo/macro_fields.hpp"

using namespace kchemo;

namespace {

SpatialGrid periodic(std::size_t n, double x0 = -1.0, double x1 = 1.0) {
  return build_spatial_grid(x0, x1, n, Boundary::periodic);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Closed form of S' = -S - S^2.
double logistic_decay(double s0, double t) {
  const double e = std::exp(-t);
  return s0 * e / (1.0 + s0 * (1.0 - e));
}

}  // namespace

TEST_CASE("z_step: pure relaxation reaches g(1 - e^{-t}) exactly") {
  const auto g = periodic(8);
  MacroState m(8);
  m.s.assign(8, 1.0);
  const ReceptorLaw law{1.0, 2.0};  // g(1) = 1
  const double t = std::numbers::ln2;
  for (int steps : {1, 7, 100}) {
    MacroState cur = m;
    for (int k = 0; k < steps; ++k) cur.z = z_step(cur, law, t / steps, g, 1e-12);
    for (double z : cur.z) CHECK(z == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("z_step: equilibrium, identity and vacuum") {
  const auto g = periodic(10);
  MacroState m(10);
  const ReceptorLaw law{1.0, 1.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (std::size_t i = 0; i < 10; ++i) {
    m.s[i] = u(rng);
    m.rho[i] = 1.0;
    m.j[i] = 0.0;
  }
  m.s.assign(10, 0.7);
  m.z.assign(10, g_eval(0.7, law));
  for (int k = 0; k < 20; ++k) {
    const auto z = z_step(m, law, 0.1, g, 1e-12);
    for (double v : z) CHECK(v == doctest::Approx(g_eval(0.7, law)).epsilon(1e-15));
  }
  for (std::size_t i = 0; i < 10; ++i) m.z[i] = u(rng);
  CHECK(z_step(m, law, 0.0, g, 1e-12) == m.z);

  // Below the floor the flux is ignored even if it is inconsistent.
  MacroState vac(10);
  vac.j.assign(10, 5.0);
  vac.z.assign(10, 1.0);
  const auto z = z_step(vac, ReceptorLaw{1.0, 0.0}, 0.5, g, 1e-12);
  for (double v : z) CHECK(v == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("z_step: unit Courant number shifts by one cell") {
  const auto g = periodic(6);
  MacroState m(6);
  m.rho.assign(6, 2.0);
  m.j.assign(6, 1.0);  // Lambda = 0.5
  m.z = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  const double dt = 2.0 * g.dx;
  const auto z = z_step(m, ReceptorLaw{1.0, 0.0}, dt, g, 1e-12);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(z[i] == doctest::Approx(m.z[(i + 5) % 6] * std::exp(-dt)));
  }
  CHECK_THROWS_AS(z_step(m, ReceptorLaw{1.0, 0.0}, 1.01 * dt, g, 1e-12), StepRejected);
}

TEST_CASE("z_step: envelope holds step by step") {
  const auto g = periodic(40);
  MacroState m(40);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < 40; ++i) {
    m.rho[i] = 0.5 + u(rng);
    m.j[i] = (u(rng) - 0.5) * m.rho[i];
    m.s[i] = 5.0 * u(rng);
    m.z[i] = 3.0 * u(rng);
  }
  const ReceptorLaw law{1.0, 1.0};
  double z0 = 0.0;
  for (double z : m.z) z0 = std::max(z0, z);
  double t = 0.0;
  const double dt = 0.9 * g.dx;
  for (int k = 0; k < 50; ++k) {
    m.z = z_step(m, law, dt, g, 1e-12);
    t += dt;
    const double env = std::exp(-t) * z0 + law.sup() * (1.0 - std::exp(-t));
    for (double z : m.z) CHECK(z <= env * (1.0 + 1e-14));
  }
}

TEST_CASE("s_step_fd: logistic decay at t = ln 2") {
  const auto g = periodic(16);
  MacroState m(16);
  m.s.assign(16, 1.0);
  const ReceptorLaw law{1.0, 1.0};
  const double t = std::numbers::ln2;
  auto run = [&](int steps) {
    MacroState cur = m;
    for (int k = 0; k < steps; ++k) {
      cur.s = s_step_fd(cur, ProductionMode::positive_part, law, t / steps, g).s;
    }
    return cur.s[5];
  };
  const double e1 = std::abs(run(693) - 1.0 / 3.0);
  const double e2 = std::abs(run(1386) - 1.0 / 3.0);
  CHECK(e1 < 1e-4);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(logistic_decay(1.0, t) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("s_step_fd: rest state, balanced production and stored S_t") {
  const auto g = periodic(12);
  const ReceptorLaw law{1.0, 1.0};
  MacroState rest(12);
  for (int k = 0; k < 10; ++k) {
    rest.s = s_step_fd(rest, ProductionMode::signed_rate, law, 0.1, g).s;
  }
  for (double s : rest.s) CHECK(s == 0.0);

  MacroState bal(12), vac(12);
  for (std::size_t i = 0; i < 12; ++i) {
    bal.s[i] = vac.s[i] = 0.5 + 0.1 * std::sin(static_cast<double>(i));
    bal.rho[i] = 3.0;
    bal.z[i] = g_eval(bal.s[i], law);
  }
  const auto a = s_step_fd(bal, ProductionMode::signed_rate, law, 0.01, g);
  const auto b = s_step_fd(vac, ProductionMode::signed_rate, law, 0.01, g);
  CHECK(max_abs_diff(a.s, b.s) < 1e-15);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(a.s_t[i] == doctest::Approx((a.s[i] - bal.s[i]) / 0.01));
  }
  const auto same = s_step_fd(bal, ProductionMode::signed_rate, law, 0.0, g);
  CHECK(same.s == bal.s);
}

TEST_CASE("s_step_fd: negative result is rejected with the admissible step") {
  const auto g = periodic(4);
  MacroState m(4);
  m.s.assign(4, 100.0);
  const ReceptorLaw law{1.0, 1.0};
  try {
    s_step_fd(m, ProductionMode::positive_part, law, 1.0, g);
    FAIL("expected a rejection");
  } catch (const StepRejected& e) {
    CHECK(e.step() == "signal");
    CHECK(e.admissible_dt() == doctest::Approx(0.01));
  }
  const auto ok = s_step_fd(m, ProductionMode::positive_part, law, 0.01, g);
  for (double s : ok.s) CHECK(s >= 0.0);
  MacroState neg(4);
  neg.s[2] = -1.0;
  CHECK_THROWS_AS(s_step_fd(neg, ProductionMode::positive_part, law, 0.01, g), ContractViolation);
}

TEST_CASE("s_step_fd: periodic and zero-ghost solves satisfy their linear systems") {
  for (auto b : {Boundary::periodic, Boundary::zero_inflow}) {
    for (std::size_t n : {1u, 2u, 3u, 17u}) {
      const auto g = build_spatial_grid(0.0, 1.0, n, b);
      MacroState m(n);
      for (std::size_t i = 0; i < n; ++i) m.s[i] = 1.0 + 0.3 * std::cos(3.0 * static_cast<double>(i));
      const double dt = 0.05;
      const auto out = s_step_fd(m, ProductionMode::signed_rate, ReceptorLaw{}, dt, g);
      const double r = dt / (g.dx * g.dx);
      for (std::size_t i = 0; i < n; ++i) {
        auto at = [&](long k) {
          const long nn = static_cast<long>(n);
          if (b == Boundary::periodic) return out.s[static_cast<std::size_t>((k % nn + nn) % nn)];
          return (k < 0 || k >= nn) ? 0.0 : out.s[static_cast<std::size_t>(k)];
        };
        const long ii = static_cast<long>(i);
        const double lhs = (1.0 + dt + 2.0 * r) * out.s[i] - r * (at(ii - 1) + at(ii + 1));
        const double rhs = m.s[i] - dt * m.s[i] * m.s[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("central gradient is second-order") {
  auto err = [](std::size_t n) {
    const auto g = build_spatial_grid(0.0, 1.0, n, Boundary::periodic);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(2.0 * std::numbers::pi * g.centre(i));
    const auto d = central_gradient(s, g);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e = std::max(e, std::abs(d[i] - 2.0 * std::numbers::pi *
                                           std::cos(2.0 * std::numbers::pi * g.centre(i))));
    }
    return e;
  };
  CHECK(err(32) / err(64) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("heat kernel values and L1 norm") {
  CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(std::exp(-1.0) / std::sqrt(4.0 * std::numbers::pi)));
  CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(0.10379).epsilon(1e-4));
  const auto wide = build_spatial_grid(-40.0, 40.0, 16000, Boundary::periodic);
  for (double t : {0.1, 1.0, 5.0}) CHECK(std::abs(heat_kernel_l1(t, wide) - std::exp(-t)) < 1e-6);
  CHECK(std::abs(heat_kernel_l1(1.0, wide) - 0.367879) < 1e-6);
  const auto wider = build_spatial_grid(-60.0, 60.0, 12000, Boundary::periodic);
  CHECK(std::abs(heat_kernel_l1(20.0, wider) - std::exp(-20.0)) < 1e-12);
  CHECK_THROWS_AS(heat_kernel_l1(0.0, wide), DomainError);
  CHECK_THROWS_AS(heat_kernel_l1(-1.0, wide), DomainError);
  CHECK_THROWS_AS(heat_kernel_l1(5.0, build_spatial_grid(-3.0, 3.0, 100, Boundary::periodic)),
                  DomainError);
}

TEST_CASE("periodic heat stencil carries mass e^{-t}") {
  const auto g = periodic(64);
  for (double t : {1e-3, 0.05, 1.0, 7.0}) {
    double sum = 0.0;
    for (double w : periodic_heat_stencil(t, g)) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(std::exp(-t)).epsilon(1e-12));
  }
}

TEST_CASE("Duhamel oracle: trivial and separable cases") {
  const auto g = periodic(32);
  const ReceptorLaw law{1.0, 1.0};
  SignalHistory zero;
  zero.dt = 0.01;
  const std::vector<double> z32(32, 0.0);
  for (int k = 0; k <= 10; ++k) zero.push(z32, z32, z32);
  for (double s : s_oracle_duhamel(zero, 0.1, g, ProductionMode::signed_rate, law)) CHECK(s == 0.0);

  // rho = 0, S_0 = 1: the oracle integrates the logistic decay.
  SignalHistory h;
  h.dt = std::numbers::ln2 / 700.0;
  MacroState m(32);
  m.s.assign(32, 1.0);
  for (int k = 0; k <= 700; ++k) {
    h.push(m.rho, m.z, m.s);
    if (k < 700) m.s = s_step_fd(m, ProductionMode::positive_part, law, h.dt, g).s;
  }
  const auto s = s_oracle_duhamel(h, std::numbers::ln2, g, ProductionMode::positive_part, law);
  for (double v : s) CHECK(std::abs(v - 1.0 / 3.0) < 1e-3);
}

TEST_CASE("Duhamel oracle: contract violations") {
  const auto g = periodic(8);
  SignalHistory h;
  h.dt = 0.1;
  const std::vector<double> z(8, 0.0);
  h.push(z, z, z);
  h.push(z, z, z);
  CHECK_THROWS_AS(s_oracle_duhamel(h, 0.5, g, ProductionMode::signed_rate, ReceptorLaw{}),
                  ContractViolation);
  CHECK_THROWS_AS(s_oracle_duhamel(h, 0.05, g, ProductionMode::signed_rate, ReceptorLaw{}),
                  ContractViolation);
  CHECK_THROWS_AS(s_oracle_duhamel(h, 0.1, build_spatial_grid(-1, 1, 8, Boundary::zero_inflow),
                                   ProductionMode::signed_rate, ReceptorLaw{}),
                  ContractViolation);
  CHECK_NOTHROW(s_oracle_duhamel(h, 0.1, g, ProductionMode::signed_rate, ReceptorLaw{}));
}
