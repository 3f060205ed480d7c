#include "kchemo/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kchemo/errors.hpp"

namespace kchemo {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

// JSON has no inf or nan; those become null.
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string snapshot_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

void write_fields_csv(const std::string& path, const SpatialGrid& grid, const MacroState& m) {
  auto out = open_out(path);
  out << "x,rho,j,z,S,S_x,S_t\n";
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    out << num(grid.centre(i)) << ',' << num(m.rho[i]) << ',' << num(m.j[i]) << ','
        << num(m.z[i]) << ',' << num(m.s[i]) << ',' << num(m.s_x[i]) << ',' << num(m.s_t[i])
        << '\n';
  }
}

FieldSnapshot read_fields_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,rho,j,z,S,S_x,S_t", 0) != 0) {
    throw ConfigError("'" + path + "' is not a field snapshot (bad header)");
  }
  FieldSnapshot snap;
  std::vector<double>* cols[] = {&snap.x,         &snap.macro.rho, &snap.macro.j,
                                 &snap.macro.z,   &snap.macro.s,   &snap.macro.s_x,
                                 &snap.macro.s_t};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (auto* col : cols) {
      if (!std::getline(ss, cell, ',')) {
        throw ConfigError("'" + path + "' row " + std::to_string(row) + ": missing column");
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw ConfigError("'" + path + "' row " + std::to_string(row) + ": bad number");
      }
      col->push_back(v);
    }
  }
  const auto stem = std::filesystem::path(path).stem().string();
  const auto us = stem.find('_');
  if (us != std::string::npos) snap.t = std::strtod(stem.c_str() + us + 1, nullptr);
  return snap;
}

void write_kinetic_csv(const std::string& path, const PhaseGrid& grid, const KineticState& f) {
  auto out = open_out(path);
  out << "x,v,f\n";
  for (std::size_t c = 0; c < grid.n_cells(); ++c) {
    const std::string x = num(grid.space.centre(c));
    for (std::size_t k = 0; k < grid.nv(); ++k) {
      out << x << ',' << num(grid.velocity.nodes[k]) << ',' << num(f.at(c, k)) << '\n';
    }
  }
}

nlohmann::json to_json(const CheckEntry& e) {
  nlohmann::json j;
  j["name"] = e.name;
  j["observed"] = finite_or_null(e.observed);
  j["envelope"] = finite_or_null(e.envelope);
  j["margin"] = finite_or_null(e.margin);
  j["tolerance"] = finite_or_null(e.tolerance);
  j["pass"] = e.pass;
  j["informational"] = e.informational;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

nlohmann::json to_json(const InvariantReport& r) {
  nlohmann::json j;
  j["time"] = r.time;
  j["clamp_events"] = r.clamp_events;
  j["hard_failure"] = r.hard_failure();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  return j;
}

nlohmann::json to_json(const SweepResult& s) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : s.rows) j["rows"].push_back({{"eps", r.eps}, {"error", r.error}});
  j["exact"] = s.exact;
  j["slope"] = s.slope ? nlohmann::json(*s.slope) : nlohmann::json(nullptr);
  j["monotone"] = s.monotone;
  j["dt_coarsest"] = s.dt_coarsest;
  j["pilot"] = {{"ran", s.pilot.ran},
                {"fine_cells", s.pilot.fine_cells},
                {"coarse_error", s.pilot.coarse_error},
                {"fine_error", s.pilot.fine_error},
                {"discretization_estimate", s.pilot.discretization_estimate},
                {"passed", s.pilot.passed}};
  return j;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  auto out = open_out(path);
  out << "eps,error\n";
  for (const auto& r : sweep.rows) out << num(r.eps) << ',' << num(r.error) << '\n';
}

}  // namespace kchemo
