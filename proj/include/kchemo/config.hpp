#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kchemo/grid.hpp"
#include "kchemo/kinetic_core.hpp"
#include "kchemo/signal_models.hpp"

namespace kchemo {

enum class ProfileKind { constant, gaussian, step };

ProfileKind parse_profile_kind(std::string_view name);
std::string_view to_string(ProfileKind k) noexcept;

/// Named analytic initial profile.
///   constant: value
///   gaussian: base + amplitude exp(-(x - centre)^2 / (2 width^2)), periodized
///             over the domain when the boundary is periodic
///   step:     left for x < position, right otherwise
struct Profile {
  ProfileKind kind = ProfileKind::constant;
  double value = 0.0;
  double base = 0.0;
  double amplitude = 1.0;
  double centre = 0.0;
  double width = 1.0;
  double left = 0.0;
  double right = 0.0;
  double position = 0.0;

  double operator()(double x, const SpatialGrid& grid) const;
  void validate(std::string_view name) const;
  bool operator==(const Profile&) const = default;
};

std::vector<double> sample_profile(const Profile& p, const SpatialGrid& grid);

enum class DtPolicy { fixed, automatic };

struct SimConfig {
  // grid
  double x_min = -4.0;
  double x_max = 4.0;
  std::size_t n_cells = 64;
  std::size_t nv = 16;
  double v_max = 1.0;
  Boundary boundary = Boundary::periodic;

  TurningKernelSpec kernel{};
  ReceptorLaw receptor{};
  ProductionMode production = ProductionMode::positive_part;

  Profile rho0{};
  Profile z0{};
  Profile s0{};
  /// f_0(x, v) = rho_0(x) (1 + bias v / v_max) / |V|; |bias| <= 1 keeps f_0 >= 0.
  double velocity_bias = 0.0;

  double t_end = 1.0;
  DtPolicy dt_policy = DtPolicy::automatic;
  double dt = 1e-3;   ///< fixed step, or the cap under the automatic policy
  double cfl = 0.9;   ///< fraction of each admissible step used by the automatic policy
  Splitting splitting = Splitting::strang;

  std::size_t snapshots = 10;
  bool write_kinetic = true;

  bool monitors = true;
  std::optional<double> kappa;  ///< empty: estimated from a dt-refinement pilot

  std::vector<double> sweep_eps{0.2, 0.1, 0.05, 0.025};
  double sweep_t_end = 1.0;
  double sweep_cfl = 1.0;
  bool sweep_pilot = true;
  SignalSample sweep_signal{};

  void validate() const;
  SpatialGrid spatial_grid() const;
  VelocityGrid velocity_grid() const;
  PhaseGrid phase_grid() const;

  bool operator==(const SimConfig& o) const;
};

/// Parses "section.key = value" lines; '#' starts a comment. Unknown keys,
/// malformed values and invalid parameters raise ConfigError.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

/// Every key in canonical order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

}  // namespace kchemo
