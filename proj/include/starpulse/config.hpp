#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "starpulse/validation.hpp"

namespace starpulse {

/// Run configuration. Loaded from a key=value file (see README for the
/// schema); command-line flags override file values.
struct Config {
  double gamma = 2.0;
  double rho_c = 1.0;
  int basis_size = 40;
  double ode_tol = 1e-12;      ///< Lane-Emden integration
  double eig_tol = 1e-9;       ///< eigenvalue refinement tolerance
  double match_tol = 1e-12;    ///< shooting integration tolerance
  double dt_factor = 0.5;
  double periods = 8.0;
  double T = 0.0;              ///< Cauchy horizon; 0 means `periods` fundamental periods
  std::string cache_dir;       ///< empty: STARPULSE_CACHE or .starpulse-cache
  std::string out_dir = ".";
  bool use_cache = true;
  std::vector<double> eps_list{1e-2, 5e-3, 2.5e-3};
  double eps_periods = 3.0;
  std::vector<double> ritter_rho{0.5, 1.0, 2.0};
  double vacuum_eps = 1e-2;
  double vacuum_lo = 1e-3, vacuum_hi = 1e-1;
  double cauchy_guard = 0.1;

  /// Throws InvalidParams; a bad gamma lists the admissible set.
  void validate() const;
  ValidationOptions validation_options() const;
  EvolutionOptions evolution_options() const;
  ModeOptions mode_options() const;
};

/// Applies one key=value assignment. Unknown keys are errors.
void apply_setting(Config& cfg, const std::string& key, const std::string& value);
Config load_config(const std::filesystem::path& path, Config base = {});
Config parse_config(const std::string& text, Config base = {});

std::vector<double> parse_list(const std::string& text);

}  // namespace starpulse
