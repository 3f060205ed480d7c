#include "kchemo/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kchemo/errors.hpp"

namespace kchemo {

void ReceptorLaw::validate() const {
  if (!(k_d > 0.0) || !std::isfinite(k_d)) throw ConfigError("receptor K_D must be positive");
  if (!(saturation >= 0.0) || !std::isfinite(saturation)) {
    throw ConfigError("receptor saturation must be nonnegative");
  }
}

double g_eval(double s, const ReceptorLaw& law) {
  if (s < 0.0) throw DomainError("g(S) is defined for S >= 0 only");
  return law.saturation * s / (law.k_d + s);
}

double psi_eval(double s) {
  if (s < 0.0) throw DomainError("Psi(S) is defined for S >= 0 only");
  return s * (1.0 + s);
}

ProductionMode parse_production_mode(std::string_view name) {
  if (name == "signed") return ProductionMode::signed_rate;
  if (name == "positive-part" || name == "positive_part") return ProductionMode::positive_part;
  throw ConfigError("unknown production mode '" + std::string(name) +
                    "' (expected signed or positive-part)");
}

std::string_view to_string(ProductionMode m) noexcept {
  return m == ProductionMode::signed_rate ? "signed" : "positive-part";
}

double production_eval(double s, double z, double rho, ProductionMode mode, const ReceptorLaw& law) {
  const double drive = g_eval(s, law) - z;
  if (mode == ProductionMode::positive_part) return std::max(drive, 0.0) * rho;
  return drive * rho;
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "constant") return KernelKind::constant;
  if (name == "linear-temporal" || name == "linear_temporal") return KernelKind::linear_temporal;
  if (name == "monotone-phi" || name == "monotone_phi") return KernelKind::monotone_phi;
  throw ConfigError("unknown kernel kind '" + std::string(name) +
                    "' (expected constant, linear-temporal or monotone-phi)");
}

std::string_view to_string(KernelKind k) noexcept {
  switch (k) {
    case KernelKind::constant: return "constant";
    case KernelKind::linear_temporal: return "linear-temporal";
    case KernelKind::monotone_phi: return "monotone-phi";
  }
  return "constant";
}

double PhiResponse::operator()(double u) const noexcept {
  // 1 / (1 + e^{k u}) written to avoid overflow for large |k u|.
  const double a = steepness * u;
  const double logistic = a > 0.0 ? std::exp(-a) / (1.0 + std::exp(-a)) : 1.0 / (1.0 + std::exp(a));
  return alpha + (beta - alpha) * logistic;
}

void TurningKernelSpec::validate() const {
  if (!(c0 > 0.0)) throw ConfigError("kernel growth constant C0 must be positive");
  switch (kind) {
    case KernelKind::constant:
      if (!(lambda0 > 0.0)) throw ConfigError("constant kernel needs lambda0 > 0");
      break;
    case KernelKind::linear_temporal:
      if (!(lambda0 > 0.0)) throw ConfigError("linear-temporal kernel needs lambda0 > 0");
      if (!std::isfinite(sigma)) throw ConfigError("kernel sensitivity sigma must be finite");
      break;
    case KernelKind::monotone_phi:
      if (!(phi.alpha > 0.0) || !(phi.beta >= phi.alpha)) {
        throw ConfigError("monotone-phi kernel needs 0 < alpha <= beta");
      }
      if (!(phi.steepness > 0.0)) throw ConfigError("monotone-phi kernel needs steepness > 0");
      break;
  }
}

double TurningKernelSpec::lipschitz(double speed) const noexcept {
  const double scale = std::max(1.0, std::abs(speed));
  switch (kind) {
    case KernelKind::constant: return 0.0;
    case KernelKind::linear_temporal: return std::abs(sigma) * scale;
    case KernelKind::monotone_phi: return phi.lipschitz() * scale;
  }
  return 0.0;
}

KernelValue kernel_eval(const TurningKernelSpec& spec, double s_t, double s_x, double v) noexcept {
  switch (spec.kind) {
    case KernelKind::constant:
      return {spec.lambda0, false};
    case KernelKind::linear_temporal: {
      const double raw = spec.lambda0 + spec.sigma * (s_t + v * s_x);
      if (raw < 0.0) return {0.0, true};
      return {raw, false};
    }
    case KernelKind::monotone_phi:
      return {spec.phi(s_t + v * s_x), false};
  }
  return {};
}

std::vector<double> turning_matrix(const TurningKernelSpec& spec, double s_t, double s_x,
                                   const VelocityGrid& grid) {
  const std::size_t nv = grid.size();
  std::vector<double> t(nv * nv);
  for (std::size_t from = 0; from < nv; ++from) {
    const double rate = kernel_eval(spec, s_t, s_x, grid.nodes[from]).rate;
    std::fill_n(t.begin() + static_cast<std::ptrdiff_t>(from * nv), nv, rate);
  }
  return t;
}

std::vector<double> kernel_normalization(const TurningKernelSpec& spec, double s_t, double s_x,
                                         const VelocityGrid& grid) {
  const std::size_t nv = grid.size();
  const auto t = turning_matrix(spec, s_t, s_x, grid);
  std::vector<double> out(nv);
  for (std::size_t from = 0; from < nv; ++from) {
    const double lambda = grid.measure() * kernel_eval(spec, s_t, s_x, grid.nodes[from]).rate;
    if (!(lambda > 0.0)) {
      out[from] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    for (std::size_t to = 0; to < nv; ++to) sum += t[from * nv + to] / lambda * grid.weights[to];
    out[from] = sum;
  }
  return out;
}

HypothesisReport check_hypothesis_H(const TurningKernelSpec& spec,
                                    std::span<const SignalSample> samples,
                                    std::span<const double> velocities) {
  HypothesisReport report;
  constexpr double h = 1e-6;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    const double growth = spec.c0 * (1.0 + std::abs(smp.s) + std::abs(smp.s_x) + std::abs(smp.s_t));
    for (double v : velocities) {
      ++report.checks;
      const double rate = kernel_eval(spec, smp.s_t, smp.s_x, v).rate;
      if (rate < 0.0) {
        report.violations.push_back({HypothesisFailure::negative_rate, i, v, rate, 0.0});
      }
      if (rate > growth) {
        report.violations.push_back({HypothesisFailure::growth_bound, i, v, rate, growth});
      }
      const double dt_quot =
          std::abs(kernel_eval(spec, smp.s_t + h, smp.s_x, v).rate - rate) / h;
      const double dx_quot =
          std::abs(kernel_eval(spec, smp.s_t, smp.s_x + h, v).rate - rate) / h;
      const double quot = std::max(dt_quot, dx_quot);
      const double lip = spec.lipschitz(v);
      if (quot > lip * (1.0 + 1e-6) + 1e-6) {
        report.violations.push_back({HypothesisFailure::lipschitz, i, v, quot, lip});
      }
    }
  }
  return report;
}

std::string_view to_string(HypothesisFailure f) noexcept {
  switch (f) {
    case HypothesisFailure::negative_rate: return "negative-rate";
    case HypothesisFailure::growth_bound: return "growth-bound";
    case HypothesisFailure::lipschitz: return "lipschitz";
  }
  return "unknown";
}

}  // namespace kchemo
