#include "kchemo/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "kchemo/errors.hpp"

namespace kchemo {

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "constant") return ProfileKind::constant;
  if (name == "gaussian") return ProfileKind::gaussian;
  if (name == "step") return ProfileKind::step;
  throw ConfigError("unknown profile '" + std::string(name) +
                    "' (expected constant, gaussian or step)");
}

std::string_view to_string(ProfileKind k) noexcept {
  switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::step: return "step";
  }
  return "constant";
}

double Profile::operator()(double x, const SpatialGrid& grid) const {
  switch (kind) {
    case ProfileKind::constant:
      return value;
    case ProfileKind::step:
      return x < position ? left : right;
    case ProfileKind::gaussian: {
      const auto bump = [&](double d) { return std::exp(-d * d / (2.0 * width * width)); };
      double sum = bump(x - centre);
      if (grid.boundary == Boundary::periodic) {
        const double len = grid.length();
        const int images = static_cast<int>(std::ceil(10.0 * width / len)) + 1;
        for (int m = 1; m <= images; ++m) {
          sum += bump(x - centre - m * len) + bump(x - centre + m * len);
        }
      }
      return base + amplitude * sum;
    }
  }
  return 0.0;
}

void Profile::validate(std::string_view name) const {
  const std::string n(name);
  switch (kind) {
    case ProfileKind::constant:
      if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ConfigError(n + ": initial data must be nonnegative");
      }
      break;
    case ProfileKind::step:
      if (!(left >= 0.0) || !(right >= 0.0) || !std::isfinite(left) || !std::isfinite(right)) {
        throw ConfigError(n + ": initial data must be nonnegative");
      }
      break;
    case ProfileKind::gaussian:
      if (!(width > 0.0)) throw ConfigError(n + ": gaussian width must be positive");
      if (!(base >= 0.0) || !(amplitude >= 0.0) || !std::isfinite(base) ||
          !std::isfinite(amplitude)) {
        throw ConfigError(n + ": initial data must be nonnegative (base, amplitude >= 0)");
      }
      break;
  }
}

std::vector<double> sample_profile(const Profile& p, const SpatialGrid& grid) {
  std::vector<double> out(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) out[i] = p(grid.centre(i), grid);
  return out;
}

SpatialGrid SimConfig::spatial_grid() const {
  return build_spatial_grid(x_min, x_max, n_cells, boundary);
}

VelocityGrid SimConfig::velocity_grid() const { return build_velocity_grid(nv, v_max); }

PhaseGrid SimConfig::phase_grid() const { return PhaseGrid{spatial_grid(), velocity_grid()}; }

void SimConfig::validate() const {
  (void)phase_grid();
  kernel.validate();
  receptor.validate();
  rho0.validate("init.rho");
  z0.validate("init.z");
  s0.validate("init.s");
  if (!(std::abs(velocity_bias) <= 1.0)) {
    throw ConfigError("init.f.velocity_bias must lie in [-1, 1] to keep f_0 nonnegative");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("time.cfl must lie in (0, 1]");
  if (snapshots == 0) throw ConfigError("output.snapshots must be at least 1");
  if (kappa && !(*kappa >= 0.0)) throw ConfigError("monitor.kappa must be >= 0 or auto");
  if (sweep_eps.size() < 3) throw ConfigError("sweep.epsilons needs at least three values");
  for (std::size_t k = 0; k < sweep_eps.size(); ++k) {
    if (!(sweep_eps[k] > 0.0)) throw ConfigError("sweep.epsilons must be positive");
    if (k > 0 && !(sweep_eps[k] < sweep_eps[k - 1])) {
      throw ConfigError("sweep.epsilons must be strictly decreasing");
    }
  }
  if (!(sweep_t_end > 0.0)) throw ConfigError("sweep.t_end must be positive");
  if (!(sweep_cfl > 0.0 && sweep_cfl <= 1.0)) throw ConfigError("sweep.cfl must lie in (0, 1]");
}

bool SimConfig::operator==(const SimConfig& o) const {
  // %.17g round-trips every double, so textual equality is value equality.
  return serialize_config(*this) == serialize_config(o);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  if (!text.empty() && text[0] == '-') {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a == std::string::npos) throw ConfigError(key + ": empty list entry");
    out.push_back(to_double(key, item.substr(a, b - a + 1)));
  }
  return out;
}

template <class E>
E wrap_enum(const std::string& key, const std::function<E(std::string_view)>& parse,
            const std::string& text) {
  try {
    return parse(text);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

struct Field {
  std::string key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define KC_NUM(KEY, MEMBER)                                                              \
  Field {                                                                                \
    KEY, [](SimConfig& c, const std::string& v) { c.MEMBER = to_double(KEY, v); },       \
        [](const SimConfig& c) { return fmt(c.MEMBER); }                                 \
  }
#define KC_COUNT(KEY, MEMBER)                                                            \
  Field {                                                                                \
    KEY, [](SimConfig& c, const std::string& v) { c.MEMBER = to_count(KEY, v); },        \
        [](const SimConfig& c) { return std::to_string(c.MEMBER); }                      \
  }
#define KC_BOOL(KEY, MEMBER)                                                             \
  Field {                                                                                \
    KEY, [](SimConfig& c, const std::string& v) { c.MEMBER = to_bool(KEY, v); },         \
        [](const SimConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }      \
  }
#define KC_ENUM(KEY, MEMBER, TYPE, PARSE)                                                \
  Field {                                                                                \
    KEY,                                                                                 \
        [](SimConfig& c, const std::string& v) {                                         \
          c.MEMBER = wrap_enum<TYPE>(KEY, [](std::string_view s) { return PARSE(s); }, v); \
        },                                                                               \
        [](const SimConfig& c) { return std::string(to_string(c.MEMBER)); }              \
  }
#define KC_PROFILE(PREFIX, MEMBER)                                                       \
  KC_ENUM(PREFIX ".profile", MEMBER.kind, ProfileKind, parse_profile_kind),              \
      KC_NUM(PREFIX ".value", MEMBER.value), KC_NUM(PREFIX ".base", MEMBER.base),        \
      KC_NUM(PREFIX ".amplitude", MEMBER.amplitude),                                     \
      KC_NUM(PREFIX ".centre", MEMBER.centre), KC_NUM(PREFIX ".width", MEMBER.width),    \
      KC_NUM(PREFIX ".left", MEMBER.left), KC_NUM(PREFIX ".right", MEMBER.right),        \
      KC_NUM(PREFIX ".position", MEMBER.position)

DtPolicy parse_dt_policy(std::string_view s) {
  if (s == "fixed") return DtPolicy::fixed;
  if (s == "auto") return DtPolicy::automatic;
  throw ConfigError("unknown dt policy '" + std::string(s) + "' (expected fixed or auto)");
}

std::string_view to_string(DtPolicy p) noexcept {
  return p == DtPolicy::fixed ? "fixed" : "auto";
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      KC_NUM("grid.x_min", x_min),
      KC_NUM("grid.x_max", x_max),
      KC_COUNT("grid.n_cells", n_cells),
      KC_COUNT("grid.nv", nv),
      KC_NUM("grid.v_max", v_max),
      KC_ENUM("grid.boundary", boundary, Boundary, parse_boundary),
      KC_ENUM("kernel.kind", kernel.kind, KernelKind, parse_kernel_kind),
      KC_NUM("kernel.lambda0", kernel.lambda0),
      KC_NUM("kernel.sigma", kernel.sigma),
      KC_NUM("kernel.c0", kernel.c0),
      KC_NUM("kernel.phi.alpha", kernel.phi.alpha),
      KC_NUM("kernel.phi.beta", kernel.phi.beta),
      KC_NUM("kernel.phi.steepness", kernel.phi.steepness),
      KC_NUM("receptor.k_d", receptor.k_d),
      KC_NUM("receptor.saturation", receptor.saturation),
      KC_ENUM("production.mode", production, ProductionMode, parse_production_mode),
      KC_PROFILE("init.rho", rho0),
      KC_PROFILE("init.z", z0),
      KC_PROFILE("init.s", s0),
      KC_NUM("init.f.velocity_bias", velocity_bias),
      KC_NUM("time.t_end", t_end),
      KC_ENUM("time.dt_policy", dt_policy, DtPolicy, parse_dt_policy),
      KC_NUM("time.dt", dt),
      KC_NUM("time.cfl", cfl),
      KC_ENUM("time.splitting", splitting, Splitting, parse_splitting),
      KC_COUNT("output.snapshots", snapshots),
      KC_BOOL("output.kinetic", write_kinetic),
      KC_BOOL("monitor.enabled", monitors),
      Field{"monitor.kappa",
            [](SimConfig& c, const std::string& v) {
              if (v == "auto") {
                c.kappa.reset();
              } else {
                c.kappa = to_double("monitor.kappa", v);
              }
            },
            [](const SimConfig& c) { return c.kappa ? fmt(*c.kappa) : std::string("auto"); }},
      Field{"sweep.epsilons",
            [](SimConfig& c, const std::string& v) { c.sweep_eps = to_list("sweep.epsilons", v); },
            [](const SimConfig& c) {
              std::string out;
              for (std::size_t k = 0; k < c.sweep_eps.size(); ++k) {
                if (k) out += ", ";
                out += fmt(c.sweep_eps[k]);
              }
              return out;
            }},
      KC_NUM("sweep.t_end", sweep_t_end),
      KC_NUM("sweep.cfl", sweep_cfl),
      KC_BOOL("sweep.pilot", sweep_pilot),
      KC_NUM("sweep.signal.s", sweep_signal.s),
      KC_NUM("sweep.signal.s_x", sweep_signal.s_x),
      KC_NUM("sweep.signal.s_t", sweep_signal.s_t),
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  SimConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    it->set(c, value);
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace kchemo
