#include "starpulse/config.hpp"

#include <cmath>
#include <sstream>

#include "starpulse/errors.hpp"
#include "starpulse/io.hpp"

namespace starpulse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidParams("config key '" + key + "': not a number: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw InvalidParams("config key '" + key + "': not an integer: '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParams("config key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double("list", item));
  }
  return out;
}

void apply_setting(Config& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "gamma") cfg.gamma = parse_gamma(v);
  else if (key == "rho_c") cfg.rho_c = to_double(key, v);
  else if (key == "basis_size" || key == "nodes") cfg.basis_size = to_int(key, v);
  else if (key == "ode_tol") cfg.ode_tol = to_double(key, v);
  else if (key == "eig_tol") cfg.eig_tol = to_double(key, v);
  else if (key == "match_tol") cfg.match_tol = to_double(key, v);
  else if (key == "dt_factor") cfg.dt_factor = to_double(key, v);
  else if (key == "periods") cfg.periods = to_double(key, v);
  else if (key == "T") cfg.T = to_double(key, v);
  else if (key == "cache_dir") cfg.cache_dir = v;
  else if (key == "out_dir") cfg.out_dir = v;
  else if (key == "use_cache") cfg.use_cache = to_bool(key, v);
  else if (key == "eps_list") cfg.eps_list = parse_list(v);
  else if (key == "eps_periods") cfg.eps_periods = to_double(key, v);
  else if (key == "ritter_rho") cfg.ritter_rho = parse_list(v);
  else if (key == "vacuum_eps") cfg.vacuum_eps = to_double(key, v);
  else if (key == "vacuum_lo") cfg.vacuum_lo = to_double(key, v);
  else if (key == "vacuum_hi") cfg.vacuum_hi = to_double(key, v);
  else if (key == "cauchy_guard") cfg.cauchy_guard = to_double(key, v);
  else throw InvalidParams("unknown config key '" + key + "'");
}

Config parse_config(const std::string& text, Config cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidParams("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path, Config base) {
  return parse_config(io::read_file(path), std::move(base));
}

void Config::validate() const {
  GasParams::make(gamma, rho_c);
  if (basis_size < 8) throw InvalidParams("basis_size must be at least 8");
  for (double t : {ode_tol, eig_tol, match_tol}) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidParams("tolerances must lie in (0, 1)");
  }
  if (!(dt_factor > 0.0 && dt_factor <= 1.0)) throw InvalidParams("dt_factor must lie in (0, 1]");
  if (!(periods > 0.0) || !(eps_periods > 0.0)) throw InvalidParams("periods must be positive");
  if (!(T >= 0.0)) throw InvalidParams("T must be non-negative");
  if (!(vacuum_lo > 0.0 && vacuum_lo < vacuum_hi && vacuum_hi < 1.0)) throw InvalidParams("bad vacuum fit window");
  for (double r : ritter_rho) {
    if (!(r > 0.0)) throw InvalidParams("ritter_rho entries must be positive");
  }
  for (double e : eps_list) {
    if (!(e > 0.0)) throw InvalidParams("eps_list entries must be positive");
  }
  if (!(cauchy_guard > 0.0)) throw InvalidParams("cauchy_guard must be positive");
}

ModeOptions Config::mode_options() const {
  ModeOptions o;
  o.basis_size = basis_size;
  o.tol = eig_tol;
  return o;
}

EvolutionOptions Config::evolution_options() const {
  EvolutionOptions o;
  o.basis_size = basis_size;
  o.dt_factor = dt_factor;
  o.cauchy_guard = cauchy_guard;
  return o;
}

ValidationOptions Config::validation_options() const {
  ValidationOptions o;
  o.modes = mode_options();
  o.evolution = evolution_options();
  o.vacuum_lo = vacuum_lo;
  o.vacuum_hi = vacuum_hi;
  return o;
}

}  // namespace starpulse
