#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kchemo/grid.hpp"

namespace kchemo {

/// Receptor occupancy law g(S) = saturation * S / (K_D + S).
/// saturation = 0 gives the inert law g = 0.
struct ReceptorLaw {
  double k_d = 1.0;
  double saturation = 1.0;

  void validate() const;
  /// Closed-form supremum of g over S >= 0.
  double sup() const noexcept { return saturation; }
};

/// g(S); throws DomainError for S < 0.
double g_eval(double s, const ReceptorLaw& law);

/// Degradation Psi(S) = S(1 + S); throws DomainError for S < 0.
double psi_eval(double s);

enum class ProductionMode { signed_rate, positive_part };

ProductionMode parse_production_mode(std::string_view name);
std::string_view to_string(ProductionMode m) noexcept;

/// Cell-driven signal production: (g(S) - z) rho, or its positive part.
double production_eval(double s, double z, double rho, ProductionMode mode, const ReceptorLaw& law);

enum class KernelKind { constant, linear_temporal, monotone_phi };

KernelKind parse_kernel_kind(std::string_view name);
std::string_view to_string(KernelKind k) noexcept;

/// Bounded decreasing response phi(u) = alpha + (beta - alpha) / (1 + exp(steepness * u)).
struct PhiResponse {
  double alpha = 0.5;
  double beta = 2.0;
  double steepness = 1.0;

  double operator()(double u) const noexcept;
  /// sup |phi'|
  double lipschitz() const noexcept { return 0.25 * (beta - alpha) * steepness; }
};

/// Turning kernel T[S](v', v). Every supported kind depends only on the
/// pre-turn velocity v' through the path derivative S_t + v' S_x, so the
/// post-turn velocity is uniformly distributed and lambda(v') = |V| T(v').
struct TurningKernelSpec {
  KernelKind kind = KernelKind::constant;
  double lambda0 = 1.0;
  double sigma = 0.0;
  PhiResponse phi{};
  double c0 = 1.0;  ///< growth constant of the admissibility bound

  void validate() const;
  /// Lipschitz constant of the rate in (S_t, S_x) at speed |v|.
  double lipschitz(double speed) const noexcept;
};

struct KernelValue {
  double rate = 0.0;
  bool clamped = false;  ///< raw value was negative and was cut to zero
};

/// Turning rate for a cell running with velocity v; never negative.
KernelValue kernel_eval(const TurningKernelSpec& spec, double s_t, double s_x, double v) noexcept;

/// Dense T(v', v) for one cell: row = departing node, column = arriving node.
std::vector<double> turning_matrix(const TurningKernelSpec& spec, double s_t, double s_x,
                                   const VelocityGrid& grid);

/// For each departing node v', Σ_v K(v', v) w_v with K = T / lambda, lambda(v') = |V| T(v').
/// Entries where lambda(v') = 0 are NaN.
std::vector<double> kernel_normalization(const TurningKernelSpec& spec, double s_t, double s_x,
                                         const VelocityGrid& grid);

struct SignalSample {
  double s = 0.0;
  double s_x = 0.0;
  double s_t = 0.0;
};

enum class HypothesisFailure { negative_rate, growth_bound, lipschitz };

struct HypothesisViolation {
  HypothesisFailure failure;
  std::size_t sample = 0;
  double v = 0.0;
  double observed = 0.0;
  double bound = 0.0;
};

struct HypothesisReport {
  std::size_t checks = 0;
  std::vector<HypothesisViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks 0 <= T <= C0 (1 + |S| + |S_x| + |S_t|) and finite-difference
/// Lipschitz quotients on every sample at every velocity given.
HypothesisReport check_hypothesis_H(const TurningKernelSpec& spec,
                                    std::span<const SignalSample> samples,
                                    std::span<const double> velocities);

std::string_view to_string(HypothesisFailure f) noexcept;

}  // namespace kchemo
