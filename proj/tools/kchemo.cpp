// kchemo: command-line driver for the coupled simulator and the limit sweep.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "kchemo/config.hpp"
#include "kchemo/errors.hpp"
#include "kchemo/field_io.hpp"
#include "kchemo/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kMonitorFailure = 1;
constexpr int kConfigError = 2;

void print_report_failures(const std::vector<kchemo::InvariantReport>& reports) {
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      if (!c.pass && !c.informational) {
        std::fprintf(stderr, "FAIL t=%.6g %s observed=%.10g envelope=%.10g margin=%.3g\n",
                     r.time, c.name.c_str(), c.observed, c.envelope, c.margin);
      }
    }
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::size_t snapshots) {
  const auto config = kchemo::load_config(config_path);
  kchemo::RunOptions options;
  options.out_dir = out_dir;
  if (snapshots > 0) options.snapshots = snapshots;
  const auto summary = kchemo::run_coupled(config, options);
  std::printf("t=%.6g steps=%zu mass_drift=%.3g checks=%zu passed=%zu hard_failures=%zu\n",
              summary.t_final, summary.steps, summary.mass_relative_drift, summary.checks,
              summary.passes, summary.hard_failures);
  std::fprintf(stderr, "wall-clock %.3f s\n", summary.wall_seconds);
  print_report_failures(summary.reports);
  return summary.hard_failure() ? kMonitorFailure : kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  const auto config = kchemo::load_config(config_path);
  const auto start = std::chrono::steady_clock::now();
  const auto result = kchemo::run_sweep(config);
  std::filesystem::create_directories(out_dir);
  kchemo::write_sweep_csv((std::filesystem::path(out_dir) / "sweep.csv").string(), result);
  kchemo::write_json((std::filesystem::path(out_dir) / "sweep.json").string(),
                     kchemo::to_json(result));
  for (const auto& row : result.rows) std::printf("eps=%-8g error=%.6e\n", row.eps, row.error);
  if (result.exact) {
    std::printf("slope: exact (all errors vanish)\n");
  } else if (result.slope) {
    std::printf("slope=%.4f monotone=%s\n", *result.slope, result.monotone ? "yes" : "no");
  }
  if (result.pilot.ran) {
    std::printf("pilot: %zu cells, discretization estimate %.3e < %.3e\n", result.pilot.fine_cells,
                result.pilot.discretization_estimate, result.pilot.coarse_error);
  }
  std::fprintf(stderr, "wall-clock %.3f s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return kOk;
}

int cmd_check(const std::string& dir) {
  const auto reports = kchemo::replay_invariants(dir);
  std::size_t checks = 0, failures = 0;
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      ++checks;
      if (!c.pass && !c.informational) ++failures;
    }
  }
  std::printf("snapshots=%zu checks=%zu hard_failures=%zu\n", reports.size(), checks, failures);
  print_report_failures(reports);
  return failures > 0 ? kMonitorFailure : kOk;
}

int cmd_validate(const std::string& config_path, std::uint64_t seed) {
  const auto config = kchemo::load_config(config_path);
  const auto grid = config.phase_grid();

  // Admissibility of the kernel on random signal values.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.0, 10.0), slope(-10.0, 10.0);
  std::vector<kchemo::SignalSample> samples(256);
  for (auto& s : samples) s = {level(rng), slope(rng), slope(rng)};
  const auto report = kchemo::check_hypothesis_H(config.kernel, samples, grid.velocity.nodes);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    std::fprintf(stderr,
                 "kernel violates the admissibility bounds: %zu of %zu checks (first: %s at v=%g, "
                 "observed %g, bound %g)\n",
                 report.violations.size(), report.checks,
                 std::string(kchemo::to_string(v.failure)).c_str(), v.v, v.observed, v.bound);
    return kConfigError;
  }
  std::printf("config ok: %zu x %zu grid, dx=%g, %s, kernel %s, %zu admissibility checks\n",
              grid.n_cells(), grid.nv(), grid.space.dx,
              std::string(kchemo::to_string(grid.space.boundary)).c_str(),
              std::string(kchemo::to_string(config.kernel.kind)).c_str(), report.checks);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic chemotaxis simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::size_t snapshots = 0;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Run the coupled system");
  simulate->add_option("--config", config_path, "Config file")->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--snapshots", snapshots, "Snapshot count (overrides the config)");

  auto* sweep = app.add_subcommand("limit-sweep", "Epsilon sweep toward the drift limit");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--out", out_dir, "Output directory");

  auto* check = app.add_subcommand("check-invariants", "Replay monitors on a stored run");
  check->add_option("--out", out_dir, "Run directory")->required();

  auto* validate = app.add_subcommand("validate-config", "Parse and dry-run check a config");
  validate->add_option("--config", config_path, "Config file")->required();
  validate->add_option("--seed", seed, "Seed for the sampled kernel checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, snapshots);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
    if (check->parsed()) return cmd_check(out_dir);
    if (validate->parsed()) return cmd_validate(config_path, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  std::cerr << app.help();
  return kConfigError;
}
