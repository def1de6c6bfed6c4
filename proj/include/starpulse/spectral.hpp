#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "starpulse/equilibrium.hpp"
#include "starpulse/jacobi.hpp"

namespace starpulse {

/// Gauss-Jacobi quadrature for x^(3/2) (1-x)^(N/2-1) on (0, 1) together with
/// the orthonormal polynomial basis of that weight.
struct WeightedSpace {
  double N = 4.0;
  int basis_size = 0;
  Eigen::VectorXd x_nodes;
  Eigen::VectorXd weights;
  jacobi::Recurrence<double> recurrence{1.5, 1.0, 1};
  jacobi::BasisTable<double> basis;  ///< basis at x_nodes, (nodes x basis_size)

  /// `quad_points` = 0 selects 2 * basis_size + 40.
  static WeightedSpace make(const GasParams& params, int basis_size, int quad_points = 0);
  /// Basis values and derivatives at arbitrary points.
  jacobi::BasisTable<double> evaluate(const Eigen::VectorXd& x) const;
  double exponent_surface() const { return N / 2.0 - 1.0; }
};

/// Galerkin matrices of the scaled operator (physical operator / kappa^2) in
/// the inner product with the symmetrizing weight x^(3/2)(1-x)^n * omega(x).
struct GalerkinSystem {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  double kappa2 = 1.0;
};

/// Equilibrium coefficient samples needed by the Galerkin and evolution code.
struct NodeCoefficients {
  Eigen::VectorXd weight_ratio, L0, L1, c_grav, c_press, v_factor, r;
};
NodeCoefficients sample_coefficients(const Equilibrium& eq, const Eigen::VectorXd& x);

GalerkinSystem assemble(const EquilibriumProfile& profile, const WeightedSpace& space,
                        int basis_size);
GalerkinSystem assemble(const Equilibrium& eq, const WeightedSpace& space, int basis_size);
/// Same quadrature with omega = 1 and L0 = 0: the bare Jacobi operator.
GalerkinSystem assemble_pure_jacobi(const WeightedSpace& space, int basis_size);

struct EigenMode {
  int index = 1;               ///< 1-based
  double lambda = 0.0;         ///< scaled units (kappa = 1)
  double lambda_phys = 0.0;    ///< physical units, lambda * kappa^2
  Eigen::VectorXd coeffs;      ///< basis coefficients, normalized phi(0) = 1
  Eigen::VectorXd x;           ///< sample points
  Eigen::VectorXd phi;         ///< values at x
  double phi_center = 1.0;
  double phi_surface = 0.0;
  double norm = 0.0;           ///< weighted norm with the symmetrizing weight
  int sign_changes = 0;
};

struct ModeOptions {
  int basis_size = 40;
  double tol = 1e-9;           ///< relative eigenvalue change tolerated under refinement
  bool check_convergence = true;
  int max_basis_size = 240;     ///< growth limit of the convergence loop
  bool pure_jacobi = false;
};

/// Lowest `count` modes, ascending. The basis grows by 5/4 from `basis_size`
/// until eigenvalues move by less than `tol`; ConvergenceFailure past
/// `max_basis_size`.
std::vector<EigenMode> solve_modes(const Equilibrium& eq, int count, const ModeOptions& opts = {});
std::vector<EigenMode> solve_modes(const EquilibriumProfile& profile, int count,
                                   const ModeOptions& opts = {});

/// Evaluates a mode expansion at points x.
Eigen::VectorXd evaluate_mode(const WeightedSpace& space, const Eigen::VectorXd& coeffs,
                              const Eigen::VectorXd& x);

struct ShootOptions {
  double start_offset = 1e-4;  ///< x and 1 - x of the two starting points
  double x_match = 0.5;
  int series_order = 8;
  double rtol = 1e-12;
  double blowup = 1e12;
};

struct ShootResult {
  double defect = 0.0;
  double y_left = 0.0, flux_left = 0.0, y_right = 0.0, flux_right = 0.0;
};

/// Integrates L y = lambda y from both endpoints with regular Frobenius starts
/// and returns the Wronskian defect at the matching point. `lambda` is in
/// scaled units.
ShootResult shoot(const Equilibrium& eq, double lambda, const ShootOptions& opts = {});
ShootResult shoot(const EquilibriumProfile& profile, double lambda, const ShootOptions& opts = {});

/// Eigenvalue near `guess`: brackets the defect zero within +-1% and refines.
double refine_shoot(const Equilibrium& eq, double guess, const ShootOptions& opts = {});

/// Lowest `count` eigenvalues (scaled units) of -d^2/dtau^2 + q by centered
/// differences with Dirichlet ends on `intervals` and 2 * `intervals` cells,
/// Richardson extrapolated.
Eigen::VectorXd schrodinger_eigenvalues(const Equilibrium& eq, int count, int intervals = 2000);

struct PeriodDensityRow {
  double rho_c = 0.0;
  double lambda_phys = 0.0;
  double period = 0.0;
  double period_sqrt_rho = 0.0;
};

std::vector<PeriodDensityRow> period_density_scan(double gamma, const std::vector<double>& rho_c,
                                                  const ModeOptions& opts = {});

}  // namespace starpulse
