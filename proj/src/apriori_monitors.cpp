#include "kchemo/apriori_monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kchemo/errors.hpp"

namespace kchemo {

CheckEntry make_check(std::string name, double observed, double envelope, double tolerance,
                      std::string note, bool informational) {
  CheckEntry e;
  e.name = std::move(name);
  e.observed = observed;
  e.envelope = envelope;
  e.margin = envelope - observed;
  e.tolerance = tolerance;
  e.pass = e.margin >= -tolerance;
  e.informational = informational;
  e.note = std::move(note);
  return e;
}

bool InvariantReport::hard_failure() const noexcept {
  return std::any_of(checks.begin(), checks.end(),
                     [](const CheckEntry& c) { return !c.pass && !c.informational; });
}

MonitorBaseline make_baseline(const MacroState& macro, const SpatialGrid& grid) {
  MonitorBaseline b;
  b.mass = integrate_x(macro.rho, grid);
  std::vector<double> n(macro.z.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::abs(macro.z[i] * macro.rho[i]);
  b.n0 = integrate_x(n, grid);
  for (double z : macro.z) b.z0_max = std::max(b.z0_max, std::abs(z));
  double l1 = 0.0, l2 = 0.0;
  for (double s : macro.s) {
    l1 += std::abs(s);
    l2 += s * s;
    b.s0_linf = std::max(b.s0_linf, std::abs(s));
  }
  b.s0_l1 = l1 * grid.dx;
  b.s0_l2 = std::sqrt(l2 * grid.dx);
  return b;
}

void GronwallInputs::validate() const {
  if (a.size() != b.size() || a.empty()) {
    throw ContractViolation("Gronwall inputs: a and b need the same nonzero sample count");
  }
  if (!(step > 0.0)) throw ContractViolation("Gronwall inputs: sample step must be positive");
  if (!(y0 >= 0.0)) throw ContractViolation("Gronwall inputs: y0 must be nonnegative");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !(b[i] >= 0.0)) {
      throw ContractViolation("Gronwall inputs: a and b must be nonnegative samplewise");
    }
  }
}

double GronwallInputs::horizon() const noexcept {
  return a.empty() ? 0.0 : step * static_cast<double>(a.size() - 1);
}

double gronwall_envelope(const GronwallInputs& in, double t, int substeps) {
  in.validate();
  if (t < 0.0 || t > in.horizon() * (1.0 + 1e-12)) {
    throw ContractViolation("Gronwall envelope: t outside the sampled horizon");
  }
  if (substeps < 2 || substeps % 2 != 0) {
    throw ContractViolation("Gronwall envelope: substeps must be even and >= 2");
  }
  if (t == 0.0) return 1.0 + in.y0;

  const double h = in.step;
  double a_int = 0.0;  // ∫_0^{τ_i} a
  double outer = 0.0;  // ∫_0^t (a + b) e^{-∫a}
  for (std::size_t i = 0; i + 1 < in.a.size(); ++i) {
    const double start = static_cast<double>(i) * h;
    if (start >= t) break;
    const double width = std::min(h, t - start);
    const double a0 = in.a[i], da = (in.a[i + 1] - in.a[i]) / h;
    const double b0 = in.b[i], db = (in.b[i + 1] - in.b[i]) / h;
    // On this panel a and b are linear, so ∫a is an exact quadratic.
    auto integrand = [&](double s) {
      const double inner = a_int + a0 * s + 0.5 * da * s * s;
      return (a0 + da * s + b0 + db * s) * std::exp(-inner);
    };
    const double hs = width / substeps;
    double simpson = integrand(0.0) + integrand(width);
    for (int k = 1; k < substeps; ++k) simpson += (k % 2 ? 4.0 : 2.0) * integrand(k * hs);
    outer += simpson * hs / 3.0;
    a_int += a0 * width + 0.5 * da * width * width;
  }
  return std::exp(std::exp(a_int) * (std::log1p(in.y0) + outer));
}

CheckEntry check_mass(double mass, double initial_mass, Boundary boundary, double tolerance) {
  const double scale = std::abs(initial_mass) > 0.0 ? std::abs(initial_mass) : 1.0;
  const double drift = std::abs(mass - initial_mass) / scale;
  const bool open = boundary != Boundary::periodic;
  return make_check("mass_conservation", drift, 0.0, tolerance,
                    open ? "zero-inflow boundary: mass may leave the domain"
                         : "relative drift of ||rho||_L1",
                    open);
}

CheckEntry check_n_decay(const MacroState& macro, const SpatialGrid& grid, double sup_g,
                         const MonitorBaseline& base, double t, const SlackPolicy& slack) {
  std::vector<double> n(macro.z.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::abs(macro.z[i] * macro.rho[i]);
  const double observed = integrate_x(n, grid);
  const double envelope = std::exp(-t) * (base.n0 + t * sup_g * base.mass);
  return make_check("zrho_l1_decay", observed, envelope, slack.value(),
                    "envelope e^{-t}(||z0 rho0||_L1 + t sup_g ||rho0||_L1)");
}

CheckEntry check_z_bound(const MacroState& macro, double sup_g, const MonitorBaseline& base,
                         double t, const SlackPolicy& slack) {
  double observed = 0.0;
  for (double z : macro.z) observed = std::max(observed, std::abs(z));
  const double decay = std::exp(-t);
  const double envelope = decay * base.z0_max + sup_g * (1.0 - decay);
  return make_check("z_linf_bound", observed, envelope, slack.value(),
                    "envelope e^{-t}||z0||_inf + sup_g(1 - e^{-t})");
}

std::vector<CheckEntry> diagnose_signal_lp(const MacroState& macro, const SpatialGrid& grid,
                                           const MonitorBaseline& base) {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  for (double s : macro.s) {
    l1 += std::abs(s);
    l2 += s * s;
    linf = std::max(linf, std::abs(s));
  }
  l1 *= grid.dx;
  l2 = std::sqrt(l2 * grid.dx);
  const char* note = "reference scale 1 + ||rho0||_L1 + ||S0||_p; bounding constant not explicit";
  return {
      make_check("signal_l1", l1, 1.0 + base.mass + base.s0_l1, 0.0, note, true),
      make_check("signal_l2", l2, 1.0 + base.mass + base.s0_l2, 0.0, note, true),
      make_check("signal_linf", linf, 1.0 + base.mass + base.s0_linf, 0.0, note, true),
  };
}

namespace {

GradientFit fit_log_envelope(std::span<const double> times, std::span<const double> y,
                             std::span<const double> shape) {
  GradientFit fit;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    num += y[k] * shape[k];
    den += shape[k] * shape[k];
  }
  fit.constant = den > 0.0 ? num / den : 0.0;

  // Trend of y/h in time: a positive trend means growth faster than the envelope.
  const std::size_t m = y.size();
  double tm = 0.0, rm = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    tm += times[k];
    rm += y[k] / shape[k];
  }
  tm /= static_cast<double>(m);
  rm /= static_cast<double>(m);
  double stt = 0.0, str = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    stt += (times[k] - tm) * (times[k] - tm);
    str += (times[k] - tm) * (y[k] / shape[k] - rm);
  }
  const double slope = stt > 0.0 ? str / stt : 0.0;
  fit.growth = slope * (times[m - 1] - times[0]);
  fit.super_envelope = fit.growth > 0.5 * fit.constant && fit.growth > 0.0;
  return fit;
}

}  // namespace

GradientDiagnostic diagnose_gradient_logs(std::span<const GradientSample> history) {
  GradientDiagnostic d;
  d.points = history.size();
  if (history.size() < 3) return d;
  d.skipped = false;
  std::vector<double> times, shape, sx, st;
  double rho_sup = 0.0;
  for (const auto& h : history) {
    rho_sup = std::max(rho_sup, h.rho_l2);
    const double log_t = h.t > 0.0 ? std::max(std::log(h.t), 0.0) : 0.0;
    const double log_rho = rho_sup > 0.0 ? std::max(std::log(rho_sup), 0.0) : 0.0;
    times.push_back(h.t);
    shape.push_back(1.0 + log_t + log_rho);
    sx.push_back(h.s_x_max);
    st.push_back(h.s_t_max);
  }
  d.s_x = fit_log_envelope(times, sx, shape);
  d.s_t = fit_log_envelope(times, st, shape);
  return d;
}

std::vector<CheckEntry> gradient_entries(const GradientDiagnostic& diag) {
  if (diag.skipped) {
    return {make_check("gradient_log_fit", 0.0, 0.0, 0.0,
                       "skipped: fewer than three history points", true)};
  }
  auto entry = [](const char* name, const GradientFit& f) {
    return make_check(name, f.growth, 0.5 * f.constant, 0.0,
                      "fitted constant C=" + std::to_string(f.constant) +
                          "; observed = growth of norm/envelope, envelope = C/2",
                      true);
  };
  return {entry("s_x_log_envelope", diag.s_x), entry("s_t_log_envelope", diag.s_t)};
}

}  // namespace kchemo
