#include "starpulse/evolution.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/Splines>

#include "starpulse/errors.hpp"
#include "starpulse/jacobi.hpp"

namespace starpulse {

// ---------------------------------------------------------------------------
// Nonlinearities. Powers go through log1p/expm1 so that small arguments keep
// their relative precision.

void NonlinearityTables::check(double y, double v) const {
  if (!(1.0 + y > 0.0) || !(1.0 + y + v > 0.0)) {
    std::ostringstream msg;
    msg << "particle crossing: 1 + y = " << 1.0 + y << ", 1 + y + v = " << 1.0 + y + v;
    throw DomainViolation(msg.str());
  }
}

double NonlinearityTables::G(double y, double v) const {
  check(y, v);
  return -std::expm1(-2.0 * gamma_ * std::log1p(y) - gamma_ * std::log1p(y + v));
}

double NonlinearityTables::G2(double y, double v) const { return G(y, v) - (3.0 * gamma_ * y + gamma_ * v); }

double NonlinearityTables::dG2_dv(double y, double v) const {
  check(y, v);
  return gamma_ * std::expm1(-2.0 * gamma_ * std::log1p(y) - (gamma_ + 1.0) * std::log1p(y + v));
}

double NonlinearityTables::H(double y) const {
  check(y, 0.0);
  const double a = 1.0 + y;
  return a * a - 1.0 / (a * a);
}

double NonlinearityTables::G_I(double y, double v) const {
  check(y, v);
  return std::expm1((2.0 - 2.0 * gamma_) * std::log1p(y) - (gamma_ + 1.0) * std::log1p(y + v));
}

double NonlinearityTables::G_II0(double y, double v) const {
  check(y, v);
  return -2.0 * gamma_ * std::exp((1.0 - 2.0 * gamma_) * std::log1p(y) - (gamma_ + 1.0) * std::log1p(y + v)) * v * v;
}

double NonlinearityTables::G_II1(double y, double v) const {
  const double a2 = (1.0 + y) * (1.0 + y);
  return a2 / gamma_ * dG2_dv(y, v) * ((3.0 * gamma_ - 4.0) * y + gamma_ * v) + H(y) - 4.0 * y * a2 -
         a2 * G2(y, v);
}

NonlinearityTables nonlinearities(double gamma) { return NonlinearityTables(GasParams::make(gamma).gamma); }

// ---------------------------------------------------------------------------

Evolver::Evolver(std::shared_ptr<const Equilibrium> eq, const EvolutionOptions& opts)
    : eq_(std::move(eq)), opts_(opts), tables_(eq_->params().gamma) {
  const int P = opts_.basis_size;
  if (P < 8) throw InvalidParams("evolution basis size must be at least 8");
  if (!(opts_.dt_factor > 0.0) || !(opts_.c_cfl > 0.0)) throw InvalidParams("time step factors must be positive");
  const GasParams& p = eq_->params();
  space_ = WeightedSpace::make(p, P, opts_.quad_points);
  system_ = assemble(*eq_, space_, P);
  coef_ = sample_coefficients(*eq_, space_.x_nodes);
  const Eigen::ArrayXd x = space_.x_nodes.array();
  drift_ = (2.5 * (1.0 - x) - 0.5 * p.N * x - coef_.L1.array()).matrix();

  B_ = space_.basis.value;
  D_ = space_.basis.d1;
  D2_ = space_.basis.d2;

  const Eigen::LLT<Eigen::MatrixXd> mass(system_.mass);
  if (mass.info() != Eigen::Success) throw ConvergenceFailure("mass matrix is not positive definite");
  stiffness_step_ = system_.kappa2 * mass.solve(system_.stiffness);
  const Eigen::VectorXd wm = (space_.weights.array() * coef_.weight_ratio.array()).matrix();
  projector_ = mass.solve(B_.transpose() * wm.asDiagonal());
  const Eigen::MatrixXd gram = B_.transpose() * space_.weights.asDiagonal() * B_;
  nodal_projector_ = gram.llt().solve(B_.transpose() * space_.weights.asDiagonal());

  Eigen::VectorXd ends(2);
  ends << 0.0, 1.0;
  const auto t = space_.evaluate(ends);
  center_row_ = t.value.row(0);
  surface_row_ = t.value.row(1);

  // Power iteration in the mass inner product.
  Eigen::VectorXd z = Eigen::VectorXd::Ones(P);
  double estimate = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd next = stiffness_step_ * z;
    const double rq = z.dot(system_.mass * next) / z.dot(system_.mass * z);
    next /= next.norm();
    z = next;
    if (it > 10 && std::abs(rq - estimate) <= 1e-12 * std::abs(rq)) {
      estimate = rq;
      break;
    }
    estimate = rq;
  }
  spectral_radius_ = estimate;

  ModeOptions mo;
  mo.basis_size = P;
  mo.check_convergence = false;
  modes_ = solve_modes(*eq_, std::min(P, 6), mo);

  const int q = opts_.quad_points > 0 ? opts_.quad_points : 2 * P + 40;
  const auto rule = jacobi::gauss_jacobi<double>(0.5, p.n_index, q);
  mass_x_ = rule.nodes;
  mass_w_ = rule.weights;
}

const EigenMode& Evolver::mode(int index) const {
  if (index < 1 || index > static_cast<int>(modes_.size())) throw InvalidParams("mode index out of range");
  return modes_[index - 1];
}

Eigen::VectorXd Evolver::project(const Eigen::VectorXd& nodal) const {
  if (nodal.size() != space_.x_nodes.size()) throw InvalidParams("nodal data must match the evolution nodes");
  return nodal_projector_ * nodal;
}

Eigen::VectorXd Evolver::project(const Eigen::VectorXd& x, const Eigen::VectorXd& values) const {
  const Eigen::Index n = x.size();
  if (values.size() != n || n < 2) throw InvalidParams("need at least two (x, value) samples");
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  Eigen::RowVectorXd u(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = x[order[i]];
    v[i] = values[order[i]];
    if (i > 0 && !(u[i] > u[i - 1])) throw InvalidParams("sample points must be distinct");
  }
  if (u[0] != 0.0 || u[n - 1] != 1.0) throw InvalidParams("samples must include x = 0 and x = 1");
  // Interpolate onto the quadrature nodes, then project in the weighted norm.
  // A direct fit of the basis to the samples amplifies rounding in the data.
  const auto spline = Eigen::SplineFitting<Eigen::Spline<double, 1>>::Interpolate(
      v, static_cast<Eigen::DenseIndex>(std::min<Eigen::Index>(3, n - 1)), u);
  const auto& nodes = space_.x_nodes;
  Eigen::VectorXd nodal(nodes.size());
  for (Eigen::Index q = 0; q < nodes.size(); ++q) nodal[q] = spline(nodes[q])(0);
  return nodal_projector_ * nodal;
}

StateField Evolver::state_from_coeffs(double t, Eigen::VectorXd coeffs, Eigen::VectorXd velocity) const {
  StateField s;
  s.t = t;
  s.coeffs = std::move(coeffs);
  s.velocity = std::move(velocity);
  s.y = B_ * s.coeffs;
  s.ydot = B_ * s.velocity;
  return s;
}

StateField Evolver::state(const Eigen::VectorXd& y_nodal, const Eigen::VectorXd& ydot_nodal) const {
  return state_from_coeffs(0.0, project(y_nodal), project(ydot_nodal));
}

Evolver::Nodal Evolver::nodal(const Eigen::VectorXd& coeffs) const {
  Nodal n;
  n.y = B_ * coeffs;
  n.yx = D_ * coeffs;
  n.yxx = D2_ * coeffs;
  n.v = (coef_.v_factor.array() * n.yx.array()).matrix();
  return n;
}

Eigen::VectorXd Evolver::operator_nodal(const Nodal& n) const {
  const Eigen::ArrayXd x = space_.x_nodes.array();
  return (system_.kappa2 *
          (-x * (1.0 - x) * n.yxx.array() - drift_.array() * n.yx.array() + coef_.L0.array() * n.y.array()))
      .matrix();
}

void Evolver::check_admissible(const Nodal& n) const {
  for (Eigen::Index i = 0; i < n.y.size(); ++i) {
    if (!(1.0 + n.y[i] > 0.0) || !(1.0 + n.y[i] + n.v[i] > 0.0)) {
      std::ostringstream msg;
      msg << "inadmissible state at x = " << space_.x_nodes[i] << ": 1 + y = " << 1.0 + n.y[i]
          << ", 1 + y + v = " << 1.0 + n.y[i] + n.v[i];
      throw DomainViolation(msg.str());
    }
  }
}

Eigen::VectorXd Evolver::apply_L(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
  const auto t = jacobi::evaluate(space_.recurrence, x, coeffs.size());
  const double N = eq_->params().N;
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto pt = eq_->at_x(x[i]);
    const double b = 2.5 * (1.0 - x[i]) - 0.5 * N * x[i] - pt.L1;
    const double y = t.value.row(i).dot(coeffs), yx = t.d1.row(i).dot(coeffs), yxx = t.d2.row(i).dot(coeffs);
    out[i] = eq_->kappa2 * (-x[i] * (1.0 - x[i]) * yxx - b * yx + pt.L0 * y);
  }
  return out;
}

Eigen::VectorXd Evolver::v_of(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
  const auto t = jacobi::evaluate(space_.recurrence, x, coeffs.size());
  Eigen::VectorXd v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = eq_->at_x(x[i]).v_factor * t.d1.row(i).dot(coeffs);
  return v;
}

Eigen::VectorXd Evolver::rhs(const StateField& s) const {
  const auto n = nodal(s.coeffs);
  check_admissible(n);
  const Eigen::VectorXd Ly = operator_nodal(n);
  Eigen::VectorXd out(Ly.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double y = n.y[i], v = n.v[i];
    out[i] = -(1.0 + tables_.G_I(y, v)) * Ly[i] - coef_.c_press[i] * tables_.G_II0(y, v) -
             coef_.c_grav[i] * tables_.G_II1(y, v);
  }
  return out;
}

Eigen::VectorXd Evolver::acceleration(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd a = -(stiffness_step_ * coeffs);
  if (opts_.linear) return a;
  const auto n = nodal(coeffs);
  check_admissible(n);
  const Eigen::VectorXd Ly = operator_nodal(n);
  Eigen::VectorXd nl(Ly.size());
  for (Eigen::Index i = 0; i < nl.size(); ++i) {
    const double y = n.y[i], v = n.v[i];
    nl[i] = -tables_.G_I(y, v) * Ly[i] - coef_.c_press[i] * tables_.G_II0(y, v) -
            coef_.c_grav[i] * tables_.G_II1(y, v);
  }
  a.noalias() += projector_ * nl;
  return a;
}

void Evolver::step(StateField& s, double dt) const {
  const double sup_before = s.y.size() ? s.y.cwiseAbs().maxCoeff() : 0.0;
  const double move_before = s.ydot.size() ? dt * s.ydot.cwiseAbs().maxCoeff() : 0.0;
  s.velocity += 0.5 * dt * acceleration(s.coeffs);
  s.coeffs += dt * s.velocity;
  s.velocity += 0.5 * dt * acceleration(s.coeffs);
  s.t += dt;
  s.y = B_ * s.coeffs;
  s.ydot = B_ * s.velocity;
  const double sup_after = s.y.cwiseAbs().maxCoeff();
  if (!std::isfinite(sup_after) || (sup_after > 0.0 && sup_after > 2.0 * (sup_before + move_before))) {
    std::ostringstream msg;
    msg << "sup|y| grew from " << sup_before << " to " << sup_after << " in one step at t = " << s.t;
    throw StepUnstable(msg.str());
  }
}

double Evolver::energy(const StateField& s) const {
  return 0.5 * s.velocity.dot(system_.mass * s.velocity) +
         0.5 * system_.kappa2 * s.coeffs.dot(system_.stiffness * s.coeffs);
}

double Evolver::surface_value(const Eigen::VectorXd& coeffs) const { return surface_row_.dot(coeffs); }
double Evolver::center_value(const Eigen::VectorXd& coeffs) const { return center_row_.dot(coeffs); }

Trajectory Evolver::run(StateField s, double T, double dt) const {
  if (!(T >= 0.0)) throw InvalidParams("final time must be non-negative");
  if (!(dt > 0.0)) dt = default_dt();
  if (dt > cfl_dt() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " exceeds the CFL bound " << cfl_dt();
    throw InvalidParams(msg.str());
  }
  const long steps = T > 0.0 ? static_cast<long>(std::ceil(T / dt - 1e-9)) : 0;
  const double h = steps > 0 ? T / static_cast<double>(steps) : dt;
  Trajectory traj;
  traj.dt = h;
  traj.R = eq_->R;
  traj.diagnostics.reserve(steps + 1);
  const double t0 = s.t;
  auto record = [&] {
    StepDiagnostics d;
    d.t = s.t;
    d.energy = energy(s);
    d.sup_y = s.y.cwiseAbs().maxCoeff();
    d.y_center = center_value(s.coeffs);
    d.y_surface = surface_value(s.coeffs);
    d.radius = eq_->R * (1.0 + d.y_surface);
    traj.diagnostics.push_back(d);
  };
  // Validate the initial data before stepping.
  check_admissible(nodal(s.coeffs));
  record();
  traj.snapshots.push_back(s);
  for (long k = 1; k <= steps; ++k) {
    step(s, h);
    s.t = t0 + static_cast<double>(k) * h;  // no accumulated drift in the stamps
    record();
    if (opts_.snapshot_stride > 0 && k % opts_.snapshot_stride == 0 && k != steps) traj.snapshots.push_back(s);
  }
  if (steps > 0) traj.snapshots.push_back(s);
  return traj;
}

Reconstruction Evolver::reconstruct(const StateField& s, const Eigen::VectorXd& x) const {
  const auto t = jacobi::evaluate(space_.recurrence, x, s.coeffs.size());
  Reconstruction out;
  out.x = x;
  for (auto* v : {&out.r_lagrange, &out.r_euler, &out.rho, &out.velocity}) v->resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto pt = eq_->at_x(x[i]);
    const double y = t.value.row(i).dot(s.coeffs);
    const double v = pt.v_factor * t.d1.row(i).dot(s.coeffs);
    if (!(1.0 + y > 0.0) || !(1.0 + y + v > 0.0)) throw DomainViolation("reconstruction of an inadmissible state");
    out.r_lagrange[i] = pt.r;
    out.r_euler[i] = pt.r * (1.0 + y);
    out.rho[i] = pt.rho / ((1.0 + y) * (1.0 + y) * (1.0 + y + v));
    out.velocity[i] = pt.r * t.value.row(i).dot(s.velocity);
  }
  return out;
}

double Evolver::mass(const StateField& s) const {
  const auto t = jacobi::evaluate(space_.recurrence, mass_x_, s.coeffs.size());
  const double n = eq_->params().n_index;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < mass_x_.size(); ++i) {
    const double x = mass_x_[i];
    const auto pt = eq_->at_x(x);
    const double y = t.value.row(i).dot(s.coeffs);
    const double yx = t.d1.row(i).dot(s.coeffs);
    const double v = pt.v_factor * yx;
    if (!(1.0 + y > 0.0) || !(1.0 + y + v > 0.0)) throw DomainViolation("mass of an inadmissible state");
    const double rho = pt.rho / ((1.0 + y) * (1.0 + y) * (1.0 + y + v));
    const double r = pt.r * (1.0 + y);
    const double drdx = pt.drdx * (1.0 + y) + pt.r * yx;
    sum += mass_w_[i] * rho * r * r * drdx / (std::sqrt(x) * std::pow(1.0 - x, n));
  }
  return 4.0 * std::numbers::pi * sum;
}

// ---------------------------------------------------------------------------

Trajectory evolve_seed(const Evolver& ev, double eps, double phase, double T, double dt, int index) {
  const auto& m = ev.mode(index);
  if (m.lambda_phys <= 0.0 && eps != 0.0) throw InvalidParams("seed mode must have a positive eigenvalue");
  const double omega = std::sqrt(std::max(m.lambda_phys, 0.0));
  const Eigen::VectorXd phi = ev.space().basis.value.leftCols(m.coeffs.size()) * m.coeffs;
  return ev.run(ev.state(eps * std::sin(phase) * phi, eps * omega * std::cos(phase) * phi), T, dt);
}

Trajectory evolve_cauchy(const Evolver& ev, const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1, double T,
                         double dt) {
  const double size = psi0.cwiseAbs().maxCoeff() + psi1.cwiseAbs().maxCoeff();
  if (size > ev.options().cauchy_guard) {
    std::ostringstream msg;
    msg << "Cauchy data too large: sup|psi0| + sup|psi1| = " << size << " exceeds " << ev.options().cauchy_guard;
    throw InvalidParams(msg.str());
  }
  return ev.run(ev.state(psi0, psi1), T, dt);
}

Eigen::VectorXd free_boundary(const Trajectory& traj) {
  Eigen::VectorXd r(traj.diagnostics.size());
  for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) r[static_cast<Eigen::Index>(i)] = traj.diagnostics[i].radius;
  return r;
}

std::vector<SpectrumPeak> spectrum_peaks(const Eigen::VectorXd& samples, double dt, int count) {
  const auto n = samples.size();
  if (n < 4) return {};
  std::vector<double> data(samples.data(), samples.data() + n);
  const double mean = samples.mean();
  for (double& d : data) d -= mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, data);
  const double bin = 1.0 / (static_cast<double>(n) * dt);
  std::vector<SpectrumPeak> peaks;
  const auto half = n / 2;
  auto amp = [&](Eigen::Index k) { return std::abs(spectrum[static_cast<std::size_t>(k)]); };
  for (Eigen::Index k = 1; k < half; ++k) {
    const double a = amp(k);
    if (a > amp(k - 1) && a >= amp(k + 1)) peaks.push_back({static_cast<double>(k) * bin, bin, 2.0 * a / n});
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.amplitude > b.amplitude; });
  if (static_cast<int>(peaks.size()) > count) peaks.resize(count);
  return peaks;
}

}  // namespace starpulse
