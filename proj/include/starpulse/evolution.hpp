#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "starpulse/equilibrium.hpp"
#include "starpulse/spectral.hpp"

namespace starpulse {

/// Closed-form nonlinearities of the Lagrangian wave equation for one gamma.
/// Arguments are y (relative radial displacement) and v = r dy/dr. All
/// members throw DomainViolation when 1 + y <= 0 or 1 + y + v <= 0.
class NonlinearityTables {
 public:
  explicit NonlinearityTables(double gamma) : gamma_(gamma) {}
  double gamma() const { return gamma_; }

  /// 1 - (1+y)^(-2 gamma) (1+y+v)^(-gamma)
  double G(double y, double v) const;
  /// G - (3 gamma y + gamma v), second order at the origin
  double G2(double y, double v) const;
  double dG2_dv(double y, double v) const;
  /// (1+y)^2 - (1+y)^(-2)
  double H(double y) const;
  /// (1+y)^2 (1 + dG2/dv / gamma) - 1
  double G_I(double y, double v) const;
  double G_II0(double y, double v) const;
  double G_II1(double y, double v) const;

 private:
  void check(double y, double v) const;
  double gamma_;
};

NonlinearityTables nonlinearities(double gamma);

struct EvolutionOptions {
  int basis_size = 40;
  int quad_points = 0;       ///< 0 selects 2 * basis_size + 40
  double c_cfl = 1.0;
  double dt_factor = 0.5;    ///< dt = dt_factor * c_cfl / sqrt(spectral radius)
  int snapshot_stride = 0;   ///< 0 keeps only the first and last state
  bool linear = false;       ///< drop the nonlinear terms (reference runs)
  double cauchy_guard = 0.1; ///< bound on sup|psi0| + sup|psi1|
};

/// Modal state plus its values at the evolution nodes.
struct StateField {
  double t = 0.0;
  Eigen::VectorXd coeffs, velocity;  ///< basis coefficients of y and dy/dt
  Eigen::VectorXd y, ydot;           ///< values at Evolver::nodes()
};

struct StepDiagnostics {
  double t = 0.0;
  double energy = 0.0;
  double sup_y = 0.0;
  double radius = 0.0;     ///< free-boundary radius R (1 + y(t, 1))
  double y_center = 0.0;
  double y_surface = 0.0;
};

struct Trajectory {
  double dt = 0.0;
  double R = 0.0;
  std::vector<StepDiagnostics> diagnostics;  ///< one row per step, starting at t = 0
  std::vector<StateField> snapshots;
  const StateField& last() const { return snapshots.back(); }
};

/// Eulerian fields at Lagrangian sample points.
struct Reconstruction {
  Eigen::VectorXd x, r_lagrange, r_euler, rho, velocity;
};

/// Spectral Galerkin discretization of the nonlinear equation in x with a
/// Stormer-Verlet time stepper.
class Evolver {
 public:
  Evolver(std::shared_ptr<const Equilibrium> eq, const EvolutionOptions& opts = {});

  const Equilibrium& equilibrium() const { return *eq_; }
  const EvolutionOptions& options() const { return opts_; }
  const WeightedSpace& space() const { return space_; }
  const Eigen::VectorXd& nodes() const { return space_.x_nodes; }
  int basis_size() const { return opts_.basis_size; }

  /// Largest eigenvalue of the discrete operator (physical units), by power iteration.
  double spectral_radius() const { return spectral_radius_; }
  double cfl_dt() const { return opts_.c_cfl / std::sqrt(spectral_radius_); }
  double default_dt() const { return opts_.dt_factor * cfl_dt(); }

  /// Radial mode `index` (1-based) of the same discretization.
  const EigenMode& mode(int index) const;

  /// Least-squares coefficients of nodal values (exact for polynomials of the basis degree).
  Eigen::VectorXd project(const Eigen::VectorXd& nodal) const;
  /// Coefficients of samples on [0, 1] (endpoints included), through a cubic
  /// spline evaluated at the nodes.
  Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& values) const;
  /// State from nodal data at t = 0.
  StateField state(const Eigen::VectorXd& y_nodal, const Eigen::VectorXd& ydot_nodal) const;
  StateField state_from_coeffs(double t, Eigen::VectorXd coeffs, Eigen::VectorXd velocity) const;

  /// Physical operator applied to the expansion, at points x.
  Eigen::VectorXd apply_L(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const;
  /// Pointwise d^2y/dt^2 at the nodes.
  Eigen::VectorXd rhs(const StateField& s) const;
  /// r dy/dr at points x.
  Eigen::VectorXd v_of(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const;

  /// Modal acceleration of the Galerkin system.
  Eigen::VectorXd acceleration(const Eigen::VectorXd& coeffs) const;
  /// One kick-drift-kick step. Throws DomainViolation or StepUnstable.
  void step(StateField& s, double dt) const;

  /// 1/2 |ydot|^2 + 1/2 (L y | y) in the symmetrizing weight.
  double energy(const StateField& s) const;
  double surface_value(const Eigen::VectorXd& coeffs) const;
  double center_value(const Eigen::VectorXd& coeffs) const;

  /// Integrates to T with a step not exceeding dt (T / dt rounded up).
  Trajectory run(StateField initial, double T, double dt) const;

  Reconstruction reconstruct(const StateField& s, const Eigen::VectorXd& x) const;
  /// 4 pi int rho r^2 dr over the reconstructed state.
  double mass(const StateField& s) const;

 private:
  struct Nodal {
    Eigen::VectorXd y, yx, yxx, v;
  };
  Nodal nodal(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd operator_nodal(const Nodal& n) const;
  void check_admissible(const Nodal& n) const;

  std::shared_ptr<const Equilibrium> eq_;
  EvolutionOptions opts_;
  NonlinearityTables tables_;
  WeightedSpace space_;
  GalerkinSystem system_;
  NodeCoefficients coef_;
  Eigen::VectorXd drift_;                ///< first-order coefficient b at the nodes
  Eigen::MatrixXd B_, D_, D2_;           ///< basis tables at the nodes (Q x P)
  Eigen::MatrixXd stiffness_step_;       ///< kappa^2 M^-1 K
  Eigen::MatrixXd projector_;            ///< M^-1 B^T diag(W omega)
  Eigen::MatrixXd nodal_projector_;      ///< (B^T W B)^-1 B^T W
  Eigen::RowVectorXd center_row_, surface_row_;
  double spectral_radius_ = 0.0;
  std::vector<EigenMode> modes_;
  // Auxiliary rule for the mass integral: weight x^(1/2) (1-x)^n.
  Eigen::VectorXd mass_x_, mass_w_;
};

/// Initial data eps (sin(phase) Phi, sqrt(lambda) cos(phase) Phi) for mode `index`.
Trajectory evolve_seed(const Evolver& ev, double eps, double phase, double T, double dt = 0.0,
                       int index = 1);
/// General data at the evolution nodes; rejected beyond the smallness guard.
Trajectory evolve_cauchy(const Evolver& ev, const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1,
                         double T, double dt = 0.0);

/// R_F(t) samples of a trajectory.
Eigen::VectorXd free_boundary(const Trajectory& traj);

struct SpectrumPeak {
  double frequency = 0.0;
  double bin_width = 0.0;
  double amplitude = 0.0;
};

/// Peaks of the discrete Fourier amplitude of uniformly sampled data (mean
/// removed), strongest first. Local maxima only.
std::vector<SpectrumPeak> spectrum_peaks(const Eigen::VectorXd& samples, double dt, int count);

}  // namespace starpulse
