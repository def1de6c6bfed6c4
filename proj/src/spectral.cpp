#include "starpulse/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

#include "starpulse/errors.hpp"
#include "starpulse/ode.hpp"
#include "starpulse/series.hpp"

namespace starpulse {

namespace {

constexpr double kPi = std::numbers::pi;

using Coeffs = series::Coeffs<double>;

}  // namespace

WeightedSpace WeightedSpace::make(const GasParams& params, int basis_size, int quad_points) {
  if (basis_size < 1) throw InvalidParams("basis size must be positive");
  WeightedSpace sp;
  sp.N = params.N;
  sp.basis_size = basis_size;
  const int q = quad_points > 0 ? quad_points : 2 * basis_size + 40;
  const double beta = sp.exponent_surface();
  const auto rule = jacobi::gauss_jacobi<double>(1.5, beta, q);
  sp.x_nodes = rule.nodes;
  sp.weights = rule.weights;
  sp.recurrence = jacobi::Recurrence<double>(1.5, beta, std::max(basis_size, 1));
  sp.basis = jacobi::evaluate(sp.recurrence, sp.x_nodes, basis_size);
  return sp;
}

jacobi::BasisTable<double> WeightedSpace::evaluate(const Eigen::VectorXd& x) const {
  return jacobi::evaluate(recurrence, x, basis_size);
}

NodeCoefficients sample_coefficients(const Equilibrium& eq, const Eigen::VectorXd& x) {
  NodeCoefficients c;
  for (auto* v : {&c.weight_ratio, &c.L0, &c.L1, &c.c_grav, &c.c_press, &c.v_factor, &c.r}) v->resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto p = eq.at_x(x[i]);
    c.weight_ratio[i] = p.weight_ratio;
    c.L0[i] = p.L0;
    c.L1[i] = p.L1;
    c.c_grav[i] = p.c_grav;
    c.c_press[i] = p.c_press;
    c.v_factor[i] = p.v_factor;
    c.r[i] = p.r;
  }
  return c;
}

namespace {

GalerkinSystem assemble_from(const WeightedSpace& space, int P, const Eigen::VectorXd& omega,
                             const Eigen::VectorXd& L0, double kappa2) {
  if (P > space.basis_size) throw InvalidParams("basis size exceeds the weighted space");
  const auto B = space.basis.value.leftCols(P);
  const auto D = space.basis.d1.leftCols(P);
  const Eigen::ArrayXd x = space.x_nodes.array();
  const Eigen::VectorXd wm = (space.weights.array() * omega.array()).matrix();
  const Eigen::VectorXd wk = (wm.array() * x * (1.0 - x)).matrix();
  const Eigen::VectorXd wl = (wm.array() * L0.array()).matrix();
  GalerkinSystem sys;
  sys.stiffness = D.transpose() * wk.asDiagonal() * D + B.transpose() * wl.asDiagonal() * B;
  sys.mass = B.transpose() * wm.asDiagonal() * B;
  sys.kappa2 = kappa2;
  return sys;
}

}  // namespace

GalerkinSystem assemble(const Equilibrium& eq, const WeightedSpace& space, int basis_size) {
  if (basis_size < 8) throw InvalidParams("Galerkin basis size must be at least 8");
  const auto c = sample_coefficients(eq, space.x_nodes);
  return assemble_from(space, basis_size, c.weight_ratio, c.L0, eq.kappa2);
}

GalerkinSystem assemble(const EquilibriumProfile& profile, const WeightedSpace& space, int basis_size) {
  return assemble(*profile.eq, space, basis_size);
}

GalerkinSystem assemble_pure_jacobi(const WeightedSpace& space, int basis_size) {
  const auto n = space.x_nodes.size();
  return assemble_from(space, basis_size, Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n), 1.0);
}

Eigen::VectorXd evaluate_mode(const WeightedSpace& space, const Eigen::VectorXd& coeffs,
                              const Eigen::VectorXd& x) {
  const auto t = jacobi::evaluate(space.recurrence, x, coeffs.size());
  return t.value * coeffs;
}

namespace {

struct RawModes {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

RawModes solve_pencil(const GalerkinSystem& sys) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sys.stiffness, sys.mass);
  if (ges.info() != Eigen::Success) throw ConvergenceFailure("generalized eigensolver failed");
  return {ges.eigenvalues(), ges.eigenvectors()};
}

int count_sign_changes(const Eigen::VectorXd& v) {
  const double floor = 1e-9 * v.cwiseAbs().maxCoeff();
  int changes = 0;
  double last = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= floor) continue;
    if (last != 0.0 && (v[i] > 0.0) != (last > 0.0)) ++changes;
    last = v[i];
  }
  return changes;
}

}  // namespace

std::vector<EigenMode> solve_modes(const Equilibrium& eq, int count, const ModeOptions& opts) {
  if (count < 1) throw InvalidParams("mode count must be at least 1");
  int P = opts.basis_size;
  if (P < 8 || count > P) throw InvalidParams("basis size must be at least 8 and exceed the mode count");

  // Grow the basis by 5/4 until the lowest `count` eigenvalues settle.
  WeightedSpace space;
  GalerkinSystem sys;
  RawModes raw;
  for (;;) {
    const int P2 = opts.check_convergence ? (5 * P + 3) / 4 : P;
    space = WeightedSpace::make(eq.params(), P2);
    auto system_for = [&](int size) {
      return opts.pure_jacobi ? assemble_pure_jacobi(space, size) : assemble(eq, space, size);
    };
    sys = system_for(P);
    const double asym = (sys.stiffness - sys.stiffness.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * sys.stiffness.cwiseAbs().maxCoeff()) {
      throw ConvergenceFailure("stiffness matrix lost symmetry");
    }
    raw = solve_pencil(sys);
    if (!opts.check_convergence) break;

    const auto fine = solve_pencil(system_for(P2));
    double worst = 0.0;
    int worst_index = 0;
    for (int i = 0; i < count; ++i) {
      const double change = std::abs(fine.values[i] - raw.values[i]) / std::max(1.0, std::abs(fine.values[i]));
      if (change > worst) {
        worst = change;
        worst_index = i;
      }
    }
    if (worst <= opts.tol) break;
    if (P2 > opts.max_basis_size) {
      std::ostringstream msg;
      msg << "eigenvalue " << worst_index + 1 << " still moves by " << worst << " (relative) at basis size "
          << P;
      throw ConvergenceFailure(msg.str());
    }
    P = P2;
  }
  for (int i = 0; i + 1 < std::min<int>(count + 1, P); ++i) {
    if (!(raw.values[i + 1] > raw.values[i])) throw ConvergenceFailure("eigenvalues are not simple");
  }

  Eigen::VectorXd endpoints(2);
  endpoints << 0.0, 1.0;
  const Eigen::VectorXd fine_grid = Eigen::VectorXd::LinSpaced(2001, 0.0, 1.0);
  const WeightedSpace& sp = space;
  std::vector<EigenMode> modes;
  for (int i = 0; i < count; ++i) {
    EigenMode m;
    m.index = i + 1;
    m.lambda = raw.values[i];
    m.lambda_phys = m.lambda * sys.kappa2;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.basis_size);
    c.head(P) = raw.vectors.col(i);
    const auto ends = evaluate_mode(sp, c, endpoints);
    if (std::abs(ends[0]) < 1e-12 * c.cwiseAbs().maxCoeff()) {
      throw ConvergenceFailure("eigenfunction vanishes at the center");
    }
    c /= ends[0];
    m.coeffs = c.head(P);
    m.phi_center = 1.0;
    m.phi_surface = ends[1] / ends[0];
    m.norm = std::sqrt(m.coeffs.dot(sys.mass * m.coeffs));
    m.x = sp.x_nodes;
    m.phi = evaluate_mode(sp, m.coeffs, sp.x_nodes);
    m.sign_changes = count_sign_changes(evaluate_mode(sp, m.coeffs, fine_grid));
    modes.push_back(std::move(m));
  }
  return modes;
}

std::vector<EigenMode> solve_modes(const EquilibriumProfile& profile, int count, const ModeOptions& opts) {
  auto modes = solve_modes(*profile.eq, count, opts);
  if (profile.x_nodes.size() > 0) {
    for (auto& m : modes) {
      const auto space = WeightedSpace::make(profile.params, static_cast<int>(m.coeffs.size()), 1);
      m.x = profile.x_nodes;
      m.phi = evaluate_mode(space, m.coeffs, profile.x_nodes);
    }
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Shooting in the Lane-Emden radius. State (theta, theta', y, F) with
// F = s^4 theta^(n+1) y'; the scaled eigenvalue maps to lambda_s = lambda pi^2/tau_plus^2.

namespace {

using State4 = ode::State<double, 4>;

struct PulsationRhs {
  int n;
  double pulsation;  // n (4 - 3 gamma)
  double lambda_s;
  State4 operator()(double s, const State4& u) const {
    const double th = u[0], dth = u[1];
    double thn = 1.0;
    for (int i = 0; i < n; ++i) thn *= th;
    const double s4 = s * s * s * s;
    State4 d;
    d[0] = dth;
    d[1] = -2.0 * dth / s - thn;
    d[2] = u[3] / (s4 * thn * th);
    d[3] = s4 * thn * (pulsation * dth / s - lambda_s) * u[2];
    return d;
  }
};

Coeffs shift(const Coeffs& a, int k) {
  Coeffs r = Coeffs::Zero(a.size() + k);
  r.tail(a.size()) = a;
  return r;
}

Coeffs scale(const Coeffs& a, double c) { return a * c; }

struct SideStart {
  double s, y, flux, theta, dtheta;
};

SideStart center_start(const Equilibrium& eq, double s0, double lambda_s, int order) {
  const auto& le = eq.lane_emden();
  const GasParams& p = eq.params();
  const int n = p.index();
  const auto even = center_series(p, order);
  Coeffs th = Coeffs::Zero(2 * order + 1);
  for (int k = 0; k <= order; ++k) th[2 * k] = even[k];
  const Coeffs dth = series::derivative(th);
  // u A y'' + B y' + C y = 0 with u = s
  const Coeffs A = th;
  const Coeffs B = series::add<double>(scale(th, 4.0), scale(shift(dth, 1), n + 1.0));
  Coeffs lin = Coeffs::Zero(2);
  lin[1] = lambda_s;
  const Coeffs C = series::add<double>(scale(dth, -n * (4.0 - 3.0 * p.gamma)), lin);
  const Coeffs y = series::frobenius_regular<double>(A, B, C, order);
  const auto [yv, dy] = series::eval_with_derivative<double>(y, s0);
  const auto [thv, dthv] = le.eval(s0);
  return {s0, yv, std::pow(s0, 4) * std::pow(thv, n + 1) * dy, thv, dthv};
}

SideStart surface_start(const Equilibrium& eq, double w0, double lambda_s, int order) {
  const auto& le = eq.lane_emden();
  const GasParams& p = eq.params();
  const int n = p.index();
  const double xi1 = le.xi1;
  const Coeffs th = le.surface_taylor(order + 2);
  const Coeffs th_over_w = th.tail(th.size() - 1);
  const Coeffs dth = series::derivative(th);  // d theta / dw
  const Coeffs s3 = series::linear_power(xi1, -1.0, 3);
  const Coeffs s4 = series::linear_power(xi1, -1.0, 4);
  const int o = order + 1;
  const Coeffs A = series::mul<double>(s4, th_over_w, o);
  const Coeffs B = series::add<double>(scale(series::mul<double>(s3, th, o), -4.0),
                                       scale(series::mul<double>(s4, dth, o), n + 1.0));
  const Coeffs C = series::add<double>(scale(series::mul<double>(s3, dth, o), n * (4.0 - 3.0 * p.gamma)),
                                       scale(s4, lambda_s));
  const Coeffs y = series::frobenius_regular<double>(A, B, C, order);
  const auto [yv, dyw] = series::eval_with_derivative<double>(y, w0);
  const double s0 = xi1 - w0;
  const auto [thv, dthv] = eq.theta_at(s0, w0);
  return {s0, yv, std::pow(s0, 4) * std::pow(thv, n + 1) * (-dyw), thv, dthv};
}

State4 integrate_side(const PulsationRhs& f, const SideStart& st, double s_end, double rtol, double blowup) {
  State4 u;
  u << st.theta, st.dtheta, st.y, st.flux;
  ode::Tolerance tol;
  tol.rtol = rtol;
  tol.atol = 1e-300;
  const auto res = ode::integrate<double, 4>(f, st.s, u, s_end, tol, [&](const ode::AcceptedStep<double, 4>& a) {
    if (!(std::abs(a.y1[2]) <= blowup)) {
      throw StiffnessBlowup("excluded singular solution dominates the shooting integration");
    }
    return true;
  });
  if (res.x != s_end) throw StiffnessBlowup("shooting integration stalled");
  return res.y;
}

ShootResult shoot_once(const Equilibrium& eq, double lambda, const ShootOptions& opts, double offset) {
  const GasParams& p = eq.params();
  const double lambda_s = lambda * kPi * kPi / (eq.tau_plus * eq.tau_plus);
  const PulsationRhs f{p.index(), p.n_index * (4.0 - 3.0 * p.gamma), lambda_s};
  const double s_left = eq.s_of_x(offset).first;
  const double w_right = eq.s_of_x(1.0 - offset).second;
  const double s_match = eq.s_of_x(opts.x_match).first;
  const auto left = integrate_side(f, center_start(eq, s_left, lambda_s, opts.series_order), s_match,
                                   opts.rtol, opts.blowup);
  const auto right = integrate_side(f, surface_start(eq, w_right, lambda_s, opts.series_order), s_match,
                                    opts.rtol, opts.blowup);
  ShootResult r;
  r.y_left = left[2];
  r.flux_left = left[3];
  r.y_right = right[2];
  r.flux_right = right[3];
  r.defect = r.y_left * r.flux_right - r.y_right * r.flux_left;
  return r;
}

}  // namespace

ShootResult shoot(const Equilibrium& eq, double lambda, const ShootOptions& opts) {
  try {
    return shoot_once(eq, lambda, opts, opts.start_offset);
  } catch (const StiffnessBlowup&) {
    return shoot_once(eq, lambda, opts, opts.start_offset / 10.0);
  }
}

ShootResult shoot(const EquilibriumProfile& profile, double lambda, const ShootOptions& opts) {
  return shoot(*profile.eq, lambda, opts);
}

double refine_shoot(const Equilibrium& eq, double guess, const ShootOptions& opts) {
  const double delta = 0.01 * std::max(std::abs(guess), 1e-2);
  double a = guess - delta, b = guess + delta;
  double fa = shoot(eq, a, opts).defect, fb = shoot(eq, b, opts).defect;
  if (!(fa * fb < 0.0)) {
    std::ostringstream msg;
    msg << "shooting defect does not change sign around " << guess;
    throw ConvergenceFailure(msg.str());
  }
  // Illinois variant of regula falsi.
  int side = 0;
  double c = guess;
  for (int it = 0; it < 200; ++it) {
    c = (a * fb - b * fa) / (fb - fa);
    const double fc = shoot(eq, c, opts).defect;
    if (fc == 0.0) return c;
    if (fc * fb < 0.0) {
      a = b;
      fa = fb;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    b = c;
    fb = fc;
    if (std::abs(b - a) <= 1e-14 * std::max(std::abs(c), 1e-3)) return c;
  }
  return c;
}

Eigen::VectorXd schrodinger_eigenvalues(const Equilibrium& eq, int count, int intervals) {
  auto solve = [&](int m) {
    const double h = eq.tau_plus / m;
    Eigen::VectorXd diag(m - 1), sub = Eigen::VectorXd::Constant(m - 2, -1.0 / (h * h));
    for (int j = 1; j < m; ++j) diag[j - 1] = 2.0 / (h * h) + eq.potential_tau(j * h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return Eigen::VectorXd(es.eigenvalues().head(count));
  };
  const Eigen::VectorXd coarse = solve(intervals);
  const Eigen::VectorXd fine = solve(2 * intervals);
  const Eigen::VectorXd extrapolated = (4.0 * fine - coarse) / 3.0;
  return extrapolated * (eq.tau_plus * eq.tau_plus / (kPi * kPi));
}

std::vector<PeriodDensityRow> period_density_scan(double gamma, const std::vector<double>& rho_c,
                                                  const ModeOptions& opts) {
  std::vector<PeriodDensityRow> rows;
  for (double rc : rho_c) {
    const auto params = GasParams::make(gamma, rc);
    if (!(params.gamma > 4.0 / 3.0)) throw InvalidParams("period-density scan needs gamma > 4/3");
    const auto eq = make_equilibrium(params);
    const auto modes = solve_modes(*eq, 1, opts);
    PeriodDensityRow r;
    r.rho_c = rc;
    r.lambda_phys = modes[0].lambda_phys;
    r.period = 2.0 * kPi / std::sqrt(r.lambda_phys);
    r.period_sqrt_rho = r.period * std::sqrt(rc);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace starpulse
