#pragma once

#include <Eigen/Core>
#include <memory>

#include "starpulse/gas.hpp"
#include "starpulse/lane_emden.hpp"

namespace starpulse {

/// Every equilibrium quantity at one point of the star. Lane-Emden variables
/// (s, w = xi1 - s) are dimensionless; the rest are in physical units.
struct ProfilePoint {
  double x = 0.0;
  double s = 0.0;       ///< Lane-Emden radius
  double w = 0.0;       ///< xi1 - s, kept separately for precision at the surface
  double theta = 1.0;
  double dtheta = 0.0;  ///< d theta / ds
  double r = 0.0;
  double depth = 0.0;   ///< R - r
  double rho = 0.0;
  double P = 0.0;
  double dPdr = 0.0;
  double drhodr = 0.0;
  double mass = 0.0;    ///< m(r)
  double b = 0.0;       ///< first-order coefficient of the scaled operator
  double L0 = 0.0;
  double L1 = 0.0;
  double weight_ratio = 0.0;  ///< symmetrizing weight over x^(3/2) (1-x)^n
  double c_grav = 0.0;        ///< (1/(rho r)) dP/dr
  double c_press = 0.0;       ///< P/(rho r^2); unbounded at the center
  double v_factor = 0.0;      ///< r dy/dr = v_factor * dy/dx
  double drdx = 0.0;
};

/// Continuous equilibrium built from a Lane-Emden solution and its surface
/// series. The coordinate x in [0, 1] is sin^2(kappa xi_L / 2), where xi_L is
/// the travel time of sound from the center.
class Equilibrium {
 public:
  Equilibrium(const GasParams& params, LaneEmdenSolution le, const BoundarySeries& bs);

  const GasParams& params() const { return params_; }
  const LaneEmdenSolution& lane_emden() const { return le_; }

  double R = 0.0;
  double M = 0.0;
  double rho1 = 0.0;      ///< rho ~ rho1 (R - r)^n at the surface
  double alpha = 0.0;     ///< length scale r = alpha s
  double cbar = 0.0;      ///< central sound speed
  double tau_plus = 0.0;  ///< int_0^xi1 theta^(-1/2) ds
  double xi_plus = 0.0;   ///< physical sound travel time to the surface
  double kappa = 0.0;     ///< pi / xi_plus
  double kappa2 = 0.0;

  /// (theta, theta') at Lane-Emden radius s = xi1 - w, using the surface series
  /// for small w.
  std::pair<double, double> theta_at(double s, double w) const;
  /// theta / w as w -> 0 resolved by the series.
  double theta_over_w(double w) const;

  /// Dimensionless travel times tau(s) = int_0^s theta^(-1/2) and
  /// sigma(w) = tau_plus - tau(xi1 - w).
  double tau(double s) const;
  double sigma(double w) const;

  double x_of_s(double s) const;
  double x_of_r(double r) const { return x_of_s(r / alpha); }
  /// Lane-Emden radius and surface distance at coordinate x.
  std::pair<double, double> s_of_x(double x) const;
  ProfilePoint at_x(double x) const;
  ProfilePoint at_r(double r) const { return at_x(x_of_r(r)); }
  /// Physical xi_L(r).
  double liouville_xi(double r) const;
  /// Dimensionless potential of the Schrodinger form in tau.
  double potential_tau(double tau) const;

  /// Scale turning integrals of weight * weight_ratio dx into r^4 rho dr.
  double inner_product_scale() const;

 private:
  ProfilePoint point(double x, double s, double w) const;
  double sigma_of_u(double u) const;
  double u_of_sigma(double target) const;
  double s_of_tau(double target) const;

  GasParams params_;
  LaneEmdenSolution le_;
  Eigen::VectorXd surface_;  ///< theta / w = sum_k surface_[k] w^k
  double w_series_ = 0.0;
  double s_split_ = 0.0;
  double u_split_ = 0.0;
  double tau_split_ = 0.0;
  double sigma_split_ = 0.0;
  Eigen::VectorXd gl_x_, gl_w_;
  Eigen::VectorXd tau_cum_, sigma_cum_;
  double tau_h_ = 0.0, sigma_h_ = 0.0;
};

/// Equilibrium sampled at a node set, together with the continuous evaluator.
struct EquilibriumProfile {
  GasParams params;
  double R = 0.0, M = 0.0, rho1 = 0.0, kappa = 0.0, xi_plus = 0.0;
  Eigen::VectorXd x_nodes;
  Eigen::VectorXd r_of_x, rho_of_x, P_of_x, dPdr_of_x, m_of_x;
  Eigen::VectorXd L0, L1, c_grav, c_press;
  Eigen::VectorXd weight_ratio, v_factor, depth;
  std::shared_ptr<const Equilibrium> eq;
};

EquilibriumProfile build_equilibrium(const GasParams& params, const LaneEmdenSolution& le,
                                     const BoundarySeries& bs, const Eigen::VectorXd& x_nodes);
/// Convenience: integrates Lane-Emden (default tolerance 1e-12) and fits the surface series.
EquilibriumProfile build_equilibrium(const GasParams& params, const Eigen::VectorXd& x_nodes);
std::shared_ptr<const Equilibrium> make_equilibrium(const GasParams& params, double lane_emden_tol = 1e-12);

/// (L0, L1) at the profile nodes.
std::pair<Eigen::VectorXd, Eigen::VectorXd> coefficients(const EquilibriumProfile& profile);

double liouville_xi(const EquilibriumProfile& profile, double r);

/// Potential q of -d^2/dxi^2 + q in physical units at Liouville points xi.
Eigen::VectorXd potential_q(const EquilibriumProfile& profile, const Eigen::VectorXd& xi);

}  // namespace starpulse
