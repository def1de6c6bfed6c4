#pragma once

#include <array>
#include <numbers>
#include <string>

namespace starpulse {

/// Physical configuration of a polytropic gas sphere, P = A rho^gamma.
///
/// Only the four exponents for which gamma/(gamma-1) is an integer are
/// admissible: 2, 3/2, 4/3 and 5/4 (N = 4, 6, 8, 10).
struct GasParams {
  double gamma = 2.0;
  double n_index = 1.0;  ///< polytropic index 1/(gamma-1)
  double N = 4.0;        ///< 2 gamma/(gamma-1)
  double A = 0.5;        ///< pressure constant, defaults to 1/gamma
  double g0 = 1.0 / (4.0 * std::numbers::pi);
  double rho_c = 1.0;

  /// Validates and snaps `gamma` onto the admissible set (tolerance 1e-6),
  /// throwing InvalidParams otherwise. A <= 0 selects the default 1/gamma.
  static GasParams make(double gamma, double rho_c = 1.0, double A = 0.0,
                        double g0 = 1.0 / (4.0 * std::numbers::pi));

  /// K = 4 pi g0 (gamma-1) / (A gamma), the Lane-Emden length-scale constant.
  double K() const { return 4.0 * std::numbers::pi * g0 * (gamma - 1.0) / (A * gamma); }
  /// N/2 = gamma/(gamma-1) as an integer.
  int half_N() const { return static_cast<int>(N / 2.0 + 0.5); }
  /// Integer polytropic index n = N/2 - 1.
  int index() const { return half_N() - 1; }
};

inline constexpr std::array<double, 4> kAdmissibleGammas{2.0, 1.5, 4.0 / 3.0, 1.25};

/// Human readable list used in error messages: "{2, 1.5, 1.333..., 1.25}".
std::string admissible_gamma_list();

/// Parses "1.5", "3/2" or "4/3" into a double; throws InvalidParams.
double parse_gamma(const std::string& text);

}  // namespace starpulse
