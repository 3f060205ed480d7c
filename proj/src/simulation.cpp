#include "kchemo/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "kchemo/errors.hpp"
#include "kchemo/kinetic_core.hpp"
#include "kchemo/macro_fields.hpp"

namespace kchemo {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const std::vector<double>& v, const SpatialGrid& grid) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * grid.dx);
}

double zrho_l1(const MacroState& m, const SpatialGrid& grid) {
  std::vector<double> n(m.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::abs(m.z[i] * m.rho[i]);
  return integrate_x(n, grid);
}

void refresh_moments(const KineticState& f, const PhaseGrid& grid, MacroState& m) {
  auto mom = compute_moments(f, grid);
  m.rho = std::move(mom.rho);
  m.j = std::move(mom.j);
}

double internal_state_dt_limit(const MacroState& m, const SpatialGrid& grid, double rho_floor) {
  double peak = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.rho[i] >= rho_floor && m.rho[i] > 0.0) {
      peak = std::max(peak, std::abs(m.j[i] / m.rho[i]));
    }
  }
  return peak > 0.0 ? grid.dx / peak : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> signal_rhs(const MacroState& m, const SimConfig& config,
                               const SpatialGrid& grid) {
  const std::size_t n = grid.n_cells;
  const bool periodic = grid.boundary == Boundary::periodic;
  std::vector<double> out(n);
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  for (std::size_t i = 0; i < n; ++i) {
    double left, right;
    if (periodic) {
      left = m.s[(i + n - 1) % n];
      right = m.s[(i + 1) % n];
    } else {
      left = i == 0 ? 0.0 : m.s[i - 1];
      right = i + 1 == n ? 0.0 : m.s[i + 1];
    }
    const double lap = (left - 2.0 * m.s[i] + right) * inv_dx2;
    out[i] = lap +
             production_eval(m.s[i], m.z[i], m.rho[i], config.production, config.receptor) -
             psi_eval(m.s[i]);
  }
  return out;
}

CoupledSystem::CoupledSystem(const SimConfig& config) : config_(config) {
  config_.validate();
  grid_ = config_.phase_grid();
  const auto& space = grid_.space;
  const auto& vel = grid_.velocity;
  const auto rho0 = sample_profile(config_.rho0, space);

  f_ = KineticState(grid_);
  for (std::size_t c = 0; c < grid_.n_cells(); ++c) {
    for (std::size_t k = 0; k < grid_.nv(); ++k) {
      f_.at(c, k) =
          rho0[c] * (1.0 + config_.velocity_bias * vel.nodes[k] / vel.v_max) / vel.measure();
    }
  }

  macro_ = MacroState(space.n_cells);
  refresh_moments(f_, grid_, macro_);
  macro_.z = sample_profile(config_.z0, space);
  macro_.s = sample_profile(config_.s0, space);
  macro_.s_x = central_gradient(macro_.s, space);
  macro_.s_t = signal_rhs(macro_, config_, space);

  double mean = 0.0;
  for (double r : rho0) mean += r;
  mean /= static_cast<double>(rho0.size());
  rho_floor_ = std::max(1e-12 * mean, std::numeric_limits<double>::min());
}

double CoupledSystem::admissible_dt() const {
  return std::min({transport_dt_limit(grid_), collision_dt_limit(macro_, config_.kernel, grid_),
                   signal_dt_limit(macro_, config_.production, config_.receptor),
                   internal_state_dt_limit(macro_, grid_.space, rho_floor_)});
}

void CoupledSystem::step(double dt) {
  if (dt < 0.0 || !std::isfinite(dt)) throw ContractViolation("step: dt must be finite and >= 0");
  if (dt == 0.0) return;
  const auto& space = grid_.space;

  MacroState m = macro_;
  refresh_moments(f_, grid_, m);
  auto signal = s_step_fd(m, config_.production, config_.receptor, dt, space);
  auto z = z_step(m, config_.receptor, dt, space, rho_floor_);
  m.s = std::move(signal.s);
  m.s_t = std::move(signal.s_t);
  m.z = std::move(z);
  m.s_x = central_gradient(m.s, space);

  CollisionStats stats;
  auto f = step_kinetic(f_, m, config_.kernel, dt, grid_, config_.splitting, &stats);
  refresh_moments(f, grid_, m);

  f_ = std::move(f);
  macro_ = std::move(m);
  clamp_events_ += stats.clamp_events;
  dt_min_ = steps_ == 0 ? dt : std::min(dt_min_, dt);
  dt_max_ = std::max(dt_max_, dt);
  ++steps_;
}

void CoupledSystem::advance_to(double t_target) {
  const double eps_t = 1e-12 * std::max(1.0, std::abs(t_target));
  while (t_target - f_.t > eps_t) {
    const double remaining = t_target - f_.t;
    double dt = std::min(config_.dt, remaining);
    if (config_.dt_policy == DtPolicy::fixed) {
      step(dt);
    } else {
      dt = std::min(dt, config_.cfl * admissible_dt());
      for (int attempt = 0;; ++attempt) {
        try {
          step(dt);
          break;
        } catch (const StepRejected& e) {
          const double retry = std::min(0.5 * dt, config_.cfl * e.admissible_dt());
          if (attempt >= 40 || !(retry > 1e-14 * std::max(1.0, t_target))) throw;
          dt = retry;
        }
      }
    }
    if (dt == remaining) f_.t = t_target;
  }
  f_.t = std::max(f_.t, t_target);
}

InvariantReport monitor_snapshot(const MacroState& macro, const SpatialGrid& grid,
                                 const SimConfig& config, const MonitorBaseline& base, double t,
                                 const SlackPolicy& slack,
                                 const std::vector<GradientSample>& gradient_history) {
  InvariantReport r;
  r.time = t;
  const double sup_g = config.receptor.sup();
  r.checks.push_back(check_mass(integrate_x(macro.rho, grid), base.mass, grid.boundary));
  r.checks.push_back(check_n_decay(macro, grid, sup_g, base, t, slack));
  r.checks.push_back(check_z_bound(macro, sup_g, base, t, slack));
  for (auto& e : diagnose_signal_lp(macro, grid, base)) r.checks.push_back(std::move(e));
  for (auto& e : gradient_entries(diagnose_gradient_logs(gradient_history))) {
    r.checks.push_back(std::move(e));
  }
  return r;
}

KappaPilot estimate_kappa(const SimConfig& config) {
  KappaPilot out;
  const double horizon = std::min(config.t_end, 0.25);
  if (!(horizon > 0.0)) return out;

  CoupledSystem probe(config);
  double dt0 = config.dt;
  if (config.dt_policy == DtPolicy::automatic) dt0 = std::min(dt0, config.cfl * probe.admissible_dt());
  dt0 = std::min(dt0, horizon);

  struct Result {
    double z_max, n;
    std::vector<double> s;
  };
  auto run = [&](double cap) {
    SimConfig c = config;
    c.dt = cap;
    c.dt_policy = DtPolicy::automatic;
    CoupledSystem sys(c);
    sys.advance_to(horizon);
    return Result{max_abs(sys.macro().z), zrho_l1(sys.macro(), sys.grid().space), sys.macro().s};
  };
  const auto r1 = run(dt0), r2 = run(0.5 * dt0), r4 = run(0.25 * dt0);

  // First-order Richardson: error(dt) ~ 2 |q(dt) - q(dt/2)| = kappa dt.
  const double spread = std::max(std::abs(r1.z_max - r2.z_max), std::abs(r1.n - r2.n));
  out.kappa = 2.0 * spread / dt0;

  double e12 = 0.0, e24 = 0.0;
  for (std::size_t i = 0; i < r1.s.size(); ++i) {
    e12 = std::max(e12, std::abs(r1.s[i] - r2.s[i]));
    e24 = std::max(e24, std::abs(r2.s[i] - r4.s[i]));
  }
  if (e12 > 0.0 && e24 > 0.0) out.signal_order = std::log2(e12 / e24);
  return out;
}

RunSummary run_coupled(const SimConfig& config, const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  CoupledSystem sys(config);
  const auto& space = sys.grid().space;
  const std::size_t snapshots = options.snapshots.value_or(config.snapshots);
  if (snapshots == 0) throw ConfigError("snapshots must be at least 1");

  RunSummary summary;
  summary.config_echo = serialize_config(sys.config());
  if (config.monitors) {
    if (config.kappa) {
      summary.kappa = *config.kappa;
    } else {
      const auto pilot = estimate_kappa(config);
      summary.kappa = pilot.kappa;
      summary.signal_order = pilot.signal_order;
      summary.kappa_estimated = true;
    }
  }

  const bool write = !options.out_dir.empty();
  if (write) std::filesystem::create_directories(options.out_dir);
  const auto file = [&](const std::string& name) {
    return (std::filesystem::path(options.out_dir) / name).string();
  };

  const auto base = make_baseline(sys.macro(), space);
  std::vector<GradientSample> gradients;
  auto snapshot = [&]() {
    const auto& m = sys.macro();
    const double t = sys.time();
    summary.snapshot_times.push_back(t);
    if (write) {
      write_fields_csv(file("fields_" + snapshot_tag(t) + ".csv"), space, m);
      if (config.write_kinetic) {
        write_kinetic_csv(file("kinetic_" + snapshot_tag(t) + ".csv"), sys.grid(), sys.kinetic());
      }
    }
    if (!config.monitors) return;
    gradients.push_back({t, max_abs(m.s_x), max_abs(m.s_t), l2_norm(m.rho, space)});
    const SlackPolicy slack{1e-8, summary.kappa, sys.dt_max()};
    auto report = monitor_snapshot(m, space, config, base, t, slack, gradients);
    report.clamp_events = sys.clamp_events();
    summary.reports.push_back(std::move(report));
  };

  snapshot();
  if (config.t_end > 0.0) {
    for (std::size_t k = 1; k <= snapshots; ++k) {
      sys.advance_to(config.t_end * static_cast<double>(k) / static_cast<double>(snapshots));
      snapshot();
    }
  }

  const auto& m = sys.macro();
  summary.t_final = sys.time();
  summary.steps = sys.steps();
  summary.dt_min = sys.dt_min();
  summary.dt_max = sys.dt_max();
  summary.mass_initial = base.mass;
  summary.mass_final = integrate_x(m.rho, space);
  summary.mass_relative_drift =
      base.mass > 0.0 ? std::abs(summary.mass_final - base.mass) / base.mass
                      : std::abs(summary.mass_final);
  summary.rho_l1 = summary.mass_final;
  summary.zrho_l1 = zrho_l1(m, space);
  summary.z_linf = max_abs(m.z);
  summary.s_l1 = integrate_x(m.s, space);
  summary.s_l2 = l2_norm(m.s, space);
  summary.s_linf = max_abs(m.s);
  summary.clamp_events = sys.clamp_events();
  for (const auto& r : summary.reports) {
    for (const auto& c : r.checks) {
      ++summary.checks;
      if (c.pass) ++summary.passes;
      if (!c.pass && !c.informational) ++summary.hard_failures;
    }
  }

  if (write) {
    nlohmann::json inv = nlohmann::json::array();
    for (const auto& r : summary.reports) inv.push_back(to_json(r));
    write_json(file("invariants.json"), inv);
    write_json(file("summary.json"), to_json(summary));
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return summary;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["config_echo"] = s.config_echo;
  const auto config = parse_config(s.config_echo);
  const auto grid = config.phase_grid();
  j["grid"] = {{"x_min", grid.space.x_min},
               {"x_max", grid.space.x_max},
               {"n_cells", grid.space.n_cells},
               {"dx", grid.space.dx},
               {"boundary", std::string(to_string(grid.space.boundary))},
               {"velocity_nodes", grid.velocity.nodes},
               {"velocity_weights", grid.velocity.weights}};
  j["t_final"] = s.t_final;
  j["steps"] = s.steps;
  j["dt_min"] = s.dt_min;
  j["dt_max"] = s.dt_max;
  j["norms"] = {{"mass_initial", s.mass_initial},
                {"mass_final", s.mass_final},
                {"mass_relative_drift", s.mass_relative_drift},
                {"rho_l1", s.rho_l1},
                {"zrho_l1", s.zrho_l1},
                {"z_linf", s.z_linf},
                {"s_l1", s.s_l1},
                {"s_l2", s.s_l2},
                {"s_linf", s.s_linf}};
  j["invariants"] = {{"checks", s.checks},
                     {"passes", s.passes},
                     {"hard_failures", s.hard_failures}};
  j["clamp_events"] = s.clamp_events;
  j["kappa"] = s.kappa;
  j["kappa_estimated"] = s.kappa_estimated;
  j["observed_order"] = {
      {"signal_dt", s.signal_order ? nlohmann::json(*s.signal_order) : nlohmann::json(nullptr)}};
  nlohmann::json snaps = nlohmann::json::array();
  for (double t : s.snapshot_times) {
    snaps.push_back({{"t", t}, {"fields", "fields_" + snapshot_tag(t) + ".csv"}});
  }
  j["snapshots"] = snaps;
  return j;
}

std::vector<InvariantReport> replay_invariants(const std::string& dir) {
  const auto root = std::filesystem::path(dir);
  const auto summary = read_json((root / "summary.json").string());
  SimConfig config;
  double kappa = 0.0, dt_max = 0.0;
  try {
    config = parse_config(summary.at("config_echo").get<std::string>());
    kappa = summary.at("kappa").get<double>();
    dt_max = summary.at("dt_max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("summary.json: ") + e.what());
  }
  const auto space = config.spatial_grid();

  std::vector<InvariantReport> reports;
  std::vector<GradientSample> gradients;
  MonitorBaseline base;
  bool first = true;
  for (const auto& snap : summary.at("snapshots")) {
    const double t = snap.at("t").get<double>();
    auto fields = read_fields_csv((root / snap.at("fields").get<std::string>()).string());
    if (fields.x.size() != space.n_cells) {
      throw ConfigError("snapshot at t=" + snapshot_tag(t) + " does not match the grid");
    }
    const auto& m = fields.macro;
    if (first) {
      base = make_baseline(m, space);
      first = false;
    }
    gradients.push_back({t, max_abs(m.s_x), max_abs(m.s_t), l2_norm(m.rho, space)});
    // The largest step of the run bounds every snapshot's slack.
    const SlackPolicy slack{1e-8, kappa, dt_max};
    reports.push_back(monitor_snapshot(m, space, config, base, t, slack, gradients));
  }
  return reports;
}

SweepResult run_sweep(const SimConfig& config) {
  config.validate();
  const auto grid = config.phase_grid();
  SweepProblem p;
  p.eps = config.sweep_eps;
  const auto rho = config.rho0;
  const auto space = grid.space;
  p.rho_initial = [rho, space](double x) { return rho(x, space); };
  const auto signal = config.sweep_signal;
  p.signal = [signal](double) { return signal; };
  p.spec = config.kernel;
  p.t_end = config.sweep_t_end;
  p.options.cfl = config.sweep_cfl;
  p.options.splitting = config.splitting;
  p.run_pilot = config.sweep_pilot;
  return epsilon_sweep(p, grid);
}

}  // namespace kchemo
