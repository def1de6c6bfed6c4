#pragma once

#include <Eigen/Core>
#include <map>
#include <utility>

#include "starpulse/gas.hpp"

namespace starpulse {

/// Coefficients a_0..a_order of theta(xi) = sum_k a_k xi^(2k) near the center.
Eigen::VectorXd center_series(const GasParams& params, int order);
Eigen::VectorXd center_series(double n_index, int order);

struct LaneEmdenOptions {
  double tol = 1e-12;       ///< relative tolerance of the adaptive integrator
  double xi_max = 50.0;     ///< give up (NoZeroFound) past this radius
  double xi_start = 1e-3;   ///< series start offset
  int series_order = 8;     ///< center series order used for the start
};

/// Lane-Emden function theta'' + (2/xi) theta' + theta^n = 0, theta(0) = 1,
/// theta'(0) = 0, tabulated up to its first zero xi1.
class LaneEmdenSolution {
 public:
  double n_index = 1.0;
  double tol = 1e-12;
  Eigen::VectorXd xi_grid;  ///< 0, integrator nodes, xi1
  Eigen::VectorXd theta;
  Eigen::VectorXd dtheta;
  double xi1 = 0.0;
  double mu1 = 0.0;      ///< -xi1^2 theta'(xi1)
  double dtheta1 = 0.0;  ///< theta'(xi1)

  /// (theta, theta') at 0 <= xi <= xi1: the center series below the start
  /// offset, otherwise one integrator step from the nearest node on the left.
  std::pair<double, double> eval(double xi) const;

  /// Taylor coefficients c_k of theta(xi1 - w) = sum_k c_k w^k.
  Eigen::VectorXd surface_taylor(int order) const;

 private:
  friend LaneEmdenSolution solve_lane_emden(double, const LaneEmdenOptions&);
  Eigen::VectorXd center_;
  double xi_start_ = 0.0;
};

LaneEmdenSolution solve_lane_emden(double n_index, const LaneEmdenOptions& opts = {});
LaneEmdenSolution solve_lane_emden(const GasParams& params, const LaneEmdenOptions& opts = {});
inline LaneEmdenSolution solve_lane_emden(const GasParams& params, double tol) {
  LaneEmdenOptions o;
  o.tol = tol;
  return solve_lane_emden(params, o);
}

/// Expansion of U = rho^(gamma-1) at the surface,
///   U = C3 z f(z),  z = (R - r)/R,
///   f = sum_{j,k} terms(j,k) z^j (C' z^(m+1))^k,  C' = K R^2 C3^(m-1),
/// with m = 1/(gamma-1).
class BoundarySeries {
 public:
  double C3 = 0.0;
  double Cprime = 0.0;
  int m = 1;
  int order = 0;             ///< highest power of z kept in f
  double fit_residual = 0.0; ///< rms relative misfit over the fit window

  /// Coefficient of z^j (C' z^(m+1))^k in f; zero outside the truncation.
  double terms(int j, int k) const;
  /// All nonzero (j, k) -> coefficient pairs.
  std::map<std::pair<int, int>, double> term_map() const;
  /// Coefficients of f in powers of z with C' substituted.
  Eigen::VectorXd collapse() const;
  /// U and dU/dz at z.
  std::pair<double, double> U(double z) const;

  /// Bivariate coefficients of g = z f: g_(p,k) multiplies C'^k z^p.
  Eigen::MatrixXd g;
};

/// Bivariate coefficients g_(p,k) of z f for index m, up to z^(order+1).
Eigen::MatrixXd boundary_series_structure(int m, int order);

struct BoundaryFitOptions {
  double z_lo = 1e-4;
  double z_hi = 1e-2;
  int samples = 41;
  int fit_order = 16;       ///< internal order used while fitting
  double max_residual = 1e-8;
};

/// Builds the series for the configuration `params` and radius R, fitting C3
/// by least squares against the integrated profile on the fit window.
BoundarySeries boundary_series(const GasParams& params, const LaneEmdenSolution& le, double R,
                               int order, const BoundaryFitOptions& opts = {});

}  // namespace starpulse
