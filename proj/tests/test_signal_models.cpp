#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kchemo/errors.hpp"
#include "kchemo/signal_models.hpp"

using namespace kchemo;

TEST_CASE("receptor law g") {
  const ReceptorLaw law{1.0, 1.0};
  CHECK(g_eval(0.0, law) == 0.0);
  CHECK(g_eval(1.0, law) == doctest::Approx(0.5));
  CHECK(g_eval(9.0, law) == doctest::Approx(0.9));
  CHECK(law.sup() == 1.0);
  CHECK_THROWS_AS(g_eval(-1e-3, law), DomainError);
  CHECK(g_eval(3.0, ReceptorLaw{1.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(ReceptorLaw({0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(ReceptorLaw({1.0, -1.0}).validate(), ConfigError);
}

TEST_CASE("g is monotone and below its saturation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(0.0, 100.0), kd(0.1, 10.0), sat(0.0, 5.0);
  for (int k = 0; k < 2000; ++k) {
    const ReceptorLaw law{kd(rng), sat(rng)};
    double a = s(rng), b = s(rng);
    if (a > b) std::swap(a, b);
    CHECK(g_eval(a, law) <= g_eval(b, law));
    CHECK(g_eval(b, law) <= law.sup());
  }
}

TEST_CASE("degradation Psi") {
  CHECK(psi_eval(0.0) == 0.0);
  CHECK(psi_eval(1.0) == 2.0);
  CHECK(psi_eval(0.5) == 0.75);
  CHECK_THROWS_AS(psi_eval(-0.1), DomainError);
}

TEST_CASE("production term") {
  const ReceptorLaw law{1.0, 1.0};
  CHECK(production_eval(1.0, 0.5, 2.0, ProductionMode::signed_rate, law) == 0.0);
  CHECK(production_eval(0.0, 1.0, 3.0, ProductionMode::positive_part, law) == 0.0);
  CHECK(production_eval(0.0, 1.0, 3.0, ProductionMode::signed_rate, law) == -3.0);
  CHECK(production_eval(9.0, 0.4, 2.0, ProductionMode::positive_part, law) ==
        doctest::Approx(1.0));
  CHECK(parse_production_mode("signed") == ProductionMode::signed_rate);
  CHECK(parse_production_mode("positive-part") == ProductionMode::positive_part);
  CHECK_THROWS_AS(parse_production_mode("absolute"), ConfigError);
}

TEST_CASE("kernel evaluation") {
  TurningKernelSpec lin;
  lin.kind = KernelKind::linear_temporal;
  lin.lambda0 = 1.0;
  lin.sigma = 0.5;
  auto kv = kernel_eval(lin, 0.2, 0.1, 1.0);
  CHECK(kv.rate == doctest::Approx(1.15));
  CHECK_FALSE(kv.clamped);

  TurningKernelSpec c;
  c.lambda0 = 2.0;
  CHECK(kernel_eval(c, 13.0, -4.0, 0.3).rate == 2.0);

  lin.lambda0 = 0.1;
  lin.sigma = 1.0;
  kv = kernel_eval(lin, -1.0, 0.0, 0.25);
  CHECK(kv.rate == 0.0);
  CHECK(kv.clamped);

  TurningKernelSpec phi;
  phi.kind = KernelKind::monotone_phi;
  CHECK(kernel_eval(phi, 0.0, 0.0, 0.5).rate == doctest::Approx(1.25));
  CHECK(kernel_eval(phi, 1e6, 0.0, 0.5).rate == doctest::Approx(0.5));
  CHECK(kernel_eval(phi, -1e6, 0.0, 0.5).rate == doctest::Approx(2.0));
}

TEST_CASE("kernel output is never negative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0), pos(0.01, 5.0);
  for (int k = 0; k < 3000; ++k) {
    TurningKernelSpec spec;
    spec.kind = static_cast<KernelKind>(k % 3);
    spec.lambda0 = pos(rng);
    spec.sigma = u(rng);
    const auto kv = kernel_eval(spec, u(rng), u(rng), u(rng) / 50.0);
    CHECK(kv.rate >= 0.0);
    CHECK(std::isfinite(kv.rate));
  }
}

TEST_CASE("phi response stays within its bounds and decreases") {
  const PhiResponse phi{0.5, 2.0, 3.0};
  double prev = phi(-800.0);
  for (double u = -800.0; u <= 800.0; u += 0.37) {
    const double p = phi(u);
    CHECK(p >= 0.5);
    CHECK(p <= 2.0);
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("kernel normalization integrates to one") {
  const auto grid = build_velocity_grid(16, 1.0);
  for (int kind = 0; kind < 3; ++kind) {
    TurningKernelSpec spec;
    spec.kind = static_cast<KernelKind>(kind);
    spec.lambda0 = 0.7;
    spec.sigma = 0.3;
    const auto norm = kernel_normalization(spec, 0.4, -1.1, grid);
    for (double n : norm) {
      if (!std::isnan(n)) CHECK(std::abs(n - 1.0) < 1e-12);
    }
  }
  TurningKernelSpec lin;
  lin.kind = KernelKind::linear_temporal;
  lin.lambda0 = 0.1;
  lin.sigma = 1.0;
  const auto norm = kernel_normalization(lin, -5.0, 0.0, grid);
  for (double n : norm) CHECK(std::isnan(n));
}

TEST_CASE("turning matrix rows depend on the departing node only") {
  const auto grid = build_velocity_grid(6, 1.0);
  TurningKernelSpec lin;
  lin.kind = KernelKind::linear_temporal;
  lin.lambda0 = 1.0;
  lin.sigma = 0.5;
  const auto t = turning_matrix(lin, 0.1, 0.4, grid);
  REQUIRE(t.size() == 36);
  for (std::size_t from = 0; from < 6; ++from) {
    const double expect = 1.0 + 0.5 * (0.1 + grid.nodes[from] * 0.4);
    for (std::size_t to = 0; to < 6; ++to) CHECK(t[from * 6 + to] == doctest::Approx(expect));
  }
}

TEST_CASE("admissibility check of the kernel") {
  const auto grid = build_velocity_grid(8, 1.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lvl(0.0, 10.0), sl(-10.0, 10.0);
  std::vector<SignalSample> samples(100);
  for (auto& s : samples) s = {lvl(rng), sl(rng), sl(rng)};

  TurningKernelSpec c;
  c.lambda0 = 1.0;
  c.c0 = 1.0;
  CHECK(check_hypothesis_H(c, samples, grid.nodes).ok());

  TurningKernelSpec lin;
  lin.kind = KernelKind::linear_temporal;
  lin.lambda0 = 2.0;
  lin.sigma = 0.1;
  lin.c0 = 1.0;
  const std::vector<SignalSample> zero{{0.0, 0.0, 0.0}};
  const auto bad = check_hypothesis_H(lin, zero, grid.nodes);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.violations.front().failure == HypothesisFailure::growth_bound);

  TurningKernelSpec phi;
  phi.kind = KernelKind::monotone_phi;
  phi.phi = {0.5, 2.0, 1.0};
  phi.c0 = 2.0;
  CHECK(check_hypothesis_H(phi, samples, grid.nodes).ok());
  CHECK(check_hypothesis_H(phi, samples, grid.nodes).checks > 0);
}

TEST_CASE("kernel spec validation and names") {
  TurningKernelSpec s;
  s.lambda0 = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  TurningKernelSpec p;
  p.kind = KernelKind::monotone_phi;
  p.phi.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.phi.alpha = 3.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  for (auto k : {KernelKind::constant, KernelKind::linear_temporal, KernelKind::monotone_phi}) {
    CHECK(parse_kernel_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_kernel_kind("quadratic"), ConfigError);
}
