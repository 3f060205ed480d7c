#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "kchemo/apriori_monitors.hpp"
#include "kchemo/grid.hpp"
#include "kchemo/hydro_limit.hpp"
#include "kchemo/state.hpp"

namespace kchemo {

/// File-name tag for a snapshot time, e.g. 0.250000.
std::string snapshot_tag(double t);

/// Columns x, rho, j, z, S, S_x, S_t at full precision.
void write_fields_csv(const std::string& path, const SpatialGrid& grid, const MacroState& macro);

struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> x;
  MacroState macro;
};

FieldSnapshot read_fields_csv(const std::string& path);

/// Columns x, v, f.
void write_kinetic_csv(const std::string& path, const PhaseGrid& grid, const KineticState& f);

nlohmann::json to_json(const CheckEntry& entry);
nlohmann::json to_json(const InvariantReport& report);
nlohmann::json to_json(const SweepResult& sweep);

void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

/// Columns eps, error.
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

}  // namespace kchemo
