#include "kchemo/macro_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kchemo/errors.hpp"

namespace kchemo {

namespace {

void require_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw ContractViolation(std::string(what) + ": expected " + std::to_string(n) +
                            " cells, got " + std::to_string(v.size()));
  }
}

// Solves a x = d for the symmetric tridiagonal matrix with constant diagonal
// `diag` and off-diagonal `-off` (Thomas algorithm). d is overwritten.
void solve_tridiagonal(double diag, double off, std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<double> c(n, 0.0);
  double denom = diag;
  c[0] = -off / denom;
  d[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag + off * c[i - 1];
    c[i] = -off / denom;
    d[i] = (d[i] + off * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
}

// Cyclic version via Sherman-Morrison.
void solve_cyclic_tridiagonal(double diag, double off, std::vector<double>& d) {
  const std::size_t n = d.size();
  if (n == 1) {
    d[0] /= diag - 2.0 * off;
    return;
  }
  if (n == 2) {
    // [[diag, -2 off], [-2 off, diag]]: both wrap links land on the same entry.
    const double a = diag, b = -2.0 * off;
    const double det = a * a - b * b;
    const double x0 = (a * d[0] - b * d[1]) / det;
    const double x1 = (a * d[1] - b * d[0]) / det;
    d[0] = x0;
    d[1] = x1;
    return;
  }
  // A = B + u v^T with corner entries folded into B's first/last diagonal.
  const double gamma = -diag;
  const double alpha = -off;  // A[n-1][0]
  const double beta = -off;   // A[0][n-1]
  std::vector<double> diag_b(n, diag);
  diag_b[0] = diag - gamma;
  diag_b[n - 1] = diag - alpha * beta / gamma;

  auto thomas = [&](std::vector<double>& rhs) {
    std::vector<double> c(n, 0.0);
    double denom = diag_b[0];
    c[0] = -off / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag_b[i] + off * c[i - 1];
      c[i] = -off / denom;
      rhs[i] = (rhs[i] + off * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  thomas(d);
  thomas(u);
  const double vy = d[0] + beta / gamma * d[n - 1];
  const double vq = u[0] + beta / gamma * u[n - 1];
  const double factor = vy / (1.0 + vq);
  for (std::size_t i = 0; i < n; ++i) d[i] -= factor * u[i];
}

}  // namespace

std::vector<double> z_step(const MacroState& macro, const ReceptorLaw& law, double dt,
                           const SpatialGrid& grid, double rho_floor) {
  const std::size_t n = grid.n_cells;
  require_size(macro.z, n, "z_step(z)");
  require_size(macro.rho, n, "z_step(rho)");
  require_size(macro.j, n, "z_step(j)");
  require_size(macro.s, n, "z_step(S)");
  if (dt < 0.0) throw ContractViolation("z_step: negative dt");
  if (dt == 0.0) return macro.z;

  std::vector<double> speed(n, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (macro.rho[i] >= rho_floor && macro.rho[i] > 0.0) {
      speed[i] = macro.j[i] / std::max(macro.rho[i], rho_floor);
      peak = std::max(peak, std::abs(speed[i]));
    }
  }
  if (dt * peak > grid.dx * (1.0 + 1e-12)) throw StepRejected("internal-state", dt, grid.dx / peak);

  const double decay = std::exp(-dt);
  const bool periodic = grid.boundary == Boundary::periodic;
  const auto cells = static_cast<std::ptrdiff_t>(n);
  auto value_at = [&](std::ptrdiff_t idx) {
    if (periodic) return macro.z[static_cast<std::size_t>(((idx % cells) + cells) % cells)];
    return macro.z[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, cells - 1))];
  };

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Foot of the characteristic in cell-index units; exact when speed is 0.
    const double pos = static_cast<double>(i) - speed[i] * dt / grid.dx;
    const double base = std::floor(pos);
    const double theta = pos - base;
    const auto i0 = static_cast<std::ptrdiff_t>(base);
    const double foot = theta == 0.0 ? value_at(i0)
                                     : (1.0 - theta) * value_at(i0) + theta * value_at(i0 + 1);
    const double target = g_eval(macro.s[i], law);
    z[i] = target + (foot - target) * decay;
  }
  return z;
}

double signal_dt_limit(const MacroState& macro, ProductionMode mode, const ReceptorLaw& law) {
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < macro.s.size(); ++i) {
    const double s = macro.s[i];
    const double drain = s * s - production_eval(s, macro.z[i], macro.rho[i], mode, law);
    if (drain > 0.0) limit = std::min(limit, s / drain);
  }
  return limit;
}

SignalUpdate s_step_fd(const MacroState& macro, ProductionMode mode, const ReceptorLaw& law,
                       double dt, const SpatialGrid& grid) {
  const std::size_t n = grid.n_cells;
  require_size(macro.s, n, "s_step_fd(S)");
  require_size(macro.z, n, "s_step_fd(z)");
  require_size(macro.rho, n, "s_step_fd(rho)");
  if (dt < 0.0) throw ContractViolation("s_step_fd: negative dt");
  for (double s : macro.s) {
    if (s < 0.0) throw ContractViolation("s_step_fd: signal must be nonnegative on entry");
  }
  if (dt == 0.0) {
    SignalUpdate same{macro.s, macro.s_t};
    if (same.s_t.size() != n) same.s_t.assign(n, 0.0);
    return same;
  }

  std::vector<double> rhs(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = macro.s[i];
    rhs[i] = s + dt * (production_eval(s, macro.z[i], macro.rho[i], mode, law) - s * s);
  }
  const double r = dt / (grid.dx * grid.dx);
  const double diag = 1.0 + dt + 2.0 * r;
  std::vector<double> s_new = rhs;
  if (grid.boundary == Boundary::periodic) {
    solve_cyclic_tridiagonal(diag, r, s_new);
  } else {
    solve_tridiagonal(diag, r, s_new);
  }
  for (double s : s_new) peak = std::max(peak, std::abs(s));
  // Sherman-Morrison can leave round-off sized negatives where S vanishes.
  const double round_off = 64.0 * std::numeric_limits<double>::epsilon() * peak;
  for (double& s : s_new) {
    if (s < 0.0) {
      if (s >= -round_off) {
        s = 0.0;
      } else {
        throw StepRejected("signal", dt, signal_dt_limit(macro, mode, law));
      }
    }
  }
  SignalUpdate out;
  out.s_t.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.s_t[i] = (s_new[i] - macro.s[i]) / dt;
  out.s = std::move(s_new);
  return out;
}

std::vector<double> central_gradient(std::span<const double> s, const SpatialGrid& grid) {
  const std::size_t n = grid.n_cells;
  require_size(s, n, "central_gradient");
  std::vector<double> g(n);
  const bool periodic = grid.boundary == Boundary::periodic;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? s[i - 1] : (periodic ? s[n - 1] : 0.0);
    const double right = i + 1 < n ? s[i + 1] : (periodic ? s[0] : 0.0);
    g[i] = (right - left) / (2.0 * grid.dx);
  }
  return g;
}

double heat_kernel(double t, double x) {
  return std::exp(-x * x / (4.0 * t) - t) / std::sqrt(4.0 * std::numbers::pi * t);
}

double heat_kernel_l1(double t, const SpatialGrid& grid) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const double reach = std::min(-grid.x_min, grid.x_max);
  // Mass of the unit Gaussian (variance 2t) outside [-reach, reach].
  const double tail = reach > 0.0 ? std::erfc(reach / (2.0 * std::sqrt(t))) : 1.0;
  if (tail > 1e-12) {
    throw DomainError("domain too narrow for the heat kernel at t=" + std::to_string(t) +
                      ": tail mass " + std::to_string(tail));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.n_cells; ++i) sum += heat_kernel(t, grid.centre(i));
  return sum * grid.dx;
}

std::vector<double> periodic_heat_stencil(double t, const SpatialGrid& grid) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const std::size_t n = grid.n_cells;
  const double length = grid.length();
  const double scale = 1.0 / (2.0 * std::sqrt(t));  // erf argument per unit distance
  // Images beyond this many periods carry less than 1e-14 of the mass.
  const double reach = 8.0 * std::sqrt(2.0 * t);
  const auto images = static_cast<long>(std::ceil(reach / length)) + 1;
  const double damping = std::exp(-t);
  std::vector<double> stencil(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const double offset = static_cast<double>(m) * grid.dx;
    double mass = 0.0;
    for (long k = -images; k <= images; ++k) {
      const double d = offset + static_cast<double>(k) * length;
      mass += 0.5 * (std::erf((d + 0.5 * grid.dx) * scale) - std::erf((d - 0.5 * grid.dx) * scale));
    }
    stencil[m] = damping * mass;
  }
  return stencil;
}

}  // namespace kchemo
