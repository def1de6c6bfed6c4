#pragma once

#include <string>
#include <utility>
#include <vector>

#include "starpulse/evolution.hpp"
#include "starpulse/spectral.hpp"

namespace starpulse {

/// One checked quantity. `basis` records where the expected value comes
/// from: "analytic", "theorem", "internal" (derived from the run itself) or
/// "convention".
struct ReportRow {
  std::string metric;
  double value = 0.0;
  std::string expected;
  std::string basis;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  bool inconclusive = false;

  /// All rows pass and the experiment was conclusive.
  bool passed() const;
  void add(std::string metric, double value, std::string expected, std::string basis, bool pass);
};

struct ValidationOptions {
  ModeOptions modes;
  EvolutionOptions evolution;
  double ritter_tol = 1e-6;
  double vacuum_lo = 1e-3;     ///< fit window in (R_F - r) / R
  double vacuum_hi = 1e-1;
  int vacuum_samples = 60;
  double vacuum_tol = 0.02;    ///< relative tolerance on the slope
  double order_lo = 1.8, order_hi = 2.2;
  double ratio_lo = 3.5, ratio_hi = 4.5;
  double constant_tol = 0.2;   ///< smallest-eps constant vs extrapolated
  double agreement_tol = 1e-6;
};

/// Sign of the fundamental eigenvalue against the expected sign of 3 gamma - 4.
ExperimentReport lambda_sign_map(const std::vector<double>& gammas, const ValidationOptions& opts = {});

/// sup_t |y_eps - eps y_1| for decreasing eps over `periods` linear periods;
/// y_1 is the linearized flow of the same discretization and step.
ExperimentReport epsilon_convergence(double gamma, const std::vector<double>& eps, double periods,
                                     const ValidationOptions& opts = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int samples = 0;
};

/// Log-log least squares of rho against R_F - r over the window, sampled at
/// Lagrangian points of the reconstructed state.
SlopeFit vacuum_slope(const Evolver& ev, const StateField& state, const ValidationOptions& opts = {});
/// Fit at a mid-oscillation snapshot of a seed run, plus the equilibrium calibration.
ExperimentReport vacuum_exponent(double gamma, double eps, const ValidationOptions& opts = {});
ExperimentReport vacuum_exponent(const Evolver& ev, const StateField& snapshot, const ValidationOptions& opts = {});

ExperimentReport ritter_eddington(double gamma, const std::vector<double>& rho_c, const ValidationOptions& opts = {});

/// Galerkin against Frobenius shooting for the lowest `count` modes.
ExperimentReport method_agreement(const std::vector<double>& gammas, int count, const ValidationOptions& opts = {});

}  // namespace starpulse
