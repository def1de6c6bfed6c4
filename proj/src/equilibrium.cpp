#include "starpulse/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "starpulse/errors.hpp"
#include "starpulse/jacobi.hpp"
#include "starpulse/series.hpp"

namespace starpulse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanels = 32;
constexpr int kGaussPoints = 8;
constexpr double kSurfaceLayer = 1e-2;  // series is used for w < kSurfaceLayer * xi1

double ipow(double v, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= v;
  return r;
}

}  // namespace

Equilibrium::Equilibrium(const GasParams& params, LaneEmdenSolution le, const BoundarySeries& bs)
    : params_(params), le_(std::move(le)) {
  if (bs.order < 12) throw InvalidParams("equilibrium needs a surface series of order >= 12");
  const double g = params_.gamma;
  const double rc = params_.rho_c;
  const double xi1 = le_.xi1;

  alpha = std::pow(rc, (g - 2.0) / 2.0) / std::sqrt(params_.K());
  cbar = std::sqrt(params_.A * g * std::pow(rc, g - 1.0));
  R = alpha * xi1;
  M = 4.0 * kPi * rc * alpha * alpha * alpha * le_.mu1;
  rho1 = std::pow(bs.C3 / R, params_.n_index);

  // theta / w in powers of w from U = C3 z f(z), z = w / xi1.
  const auto f = bs.collapse();
  surface_.resize(f.size());
  const double lead = bs.C3 / (std::pow(rc, g - 1.0) * xi1);
  for (Eigen::Index q = 0; q < f.size(); ++q) surface_[q] = lead * f[q] / std::pow(xi1, double(q));
  w_series_ = kSurfaceLayer * xi1;

  const auto gl = jacobi::gauss_legendre<double>(kGaussPoints);
  gl_x_ = gl.nodes;
  gl_w_ = gl.weights;

  s_split_ = 0.5 * xi1;
  u_split_ = std::sqrt(xi1 - s_split_);
  tau_h_ = s_split_ / kPanels;
  sigma_h_ = u_split_ / kPanels;
  tau_cum_ = Eigen::VectorXd::Zero(kPanels + 1);
  sigma_cum_ = Eigen::VectorXd::Zero(kPanels + 1);
  for (int j = 0; j < kPanels; ++j) {
    double acc_t = 0.0, acc_s = 0.0;
    for (int q = 0; q < kGaussPoints; ++q) {
      const double s = (j + gl_x_[q]) * tau_h_;
      acc_t += gl_w_[q] / std::sqrt(theta_at(s, xi1 - s).first);
      const double u = (j + gl_x_[q]) * sigma_h_;
      acc_s += gl_w_[q] * 2.0 / std::sqrt(theta_over_w(u * u));
    }
    tau_cum_[j + 1] = tau_cum_[j] + acc_t * tau_h_;
    sigma_cum_[j + 1] = sigma_cum_[j] + acc_s * sigma_h_;
  }
  tau_split_ = tau_cum_[kPanels];
  sigma_split_ = sigma_cum_[kPanels];
  tau_plus = tau_split_ + sigma_split_;
  xi_plus = alpha / cbar * tau_plus;
  kappa = kPi / xi_plus;
  kappa2 = kappa * kappa;
}

std::pair<double, double> Equilibrium::theta_at(double s, double w) const {
  if (w < w_series_) {
    const auto [phi, dphi] = series::eval_with_derivative<double>(surface_, w);
    return {w * phi, -(phi + w * dphi)};
  }
  return le_.eval(s);
}

double Equilibrium::theta_over_w(double w) const {
  if (w < w_series_) return series::eval<double>(surface_, w);
  return le_.eval(le_.xi1 - w).first / w;
}

double Equilibrium::tau(double s) const {
  if (s <= 0.0) return 0.0;
  if (s > s_split_) return tau_plus - sigma(le_.xi1 - s);
  const int j = std::min(kPanels - 1, static_cast<int>(s / tau_h_));
  const double a = j * tau_h_, h = s - a;
  double acc = 0.0;
  for (int q = 0; q < kGaussPoints; ++q) {
    const double t = a + h * gl_x_[q];
    acc += gl_w_[q] / std::sqrt(theta_at(t, le_.xi1 - t).first);
  }
  return tau_cum_[j] + acc * h;
}

double Equilibrium::sigma_of_u(double u) const {
  if (u <= 0.0) return 0.0;
  const int j = std::min(kPanels - 1, static_cast<int>(u / sigma_h_));
  const double a = j * sigma_h_, h = u - a;
  double acc = 0.0;
  for (int q = 0; q < kGaussPoints; ++q) {
    const double t = a + h * gl_x_[q];
    acc += gl_w_[q] * 2.0 / std::sqrt(theta_over_w(t * t));
  }
  return sigma_cum_[j] + acc * h;
}

double Equilibrium::sigma(double w) const {
  if (w <= 0.0) return 0.0;
  if (w >= le_.xi1 - s_split_) return tau_plus - tau(le_.xi1 - w);
  return sigma_of_u(std::sqrt(w));
}

double Equilibrium::x_of_s(double s) const {
  if (s <= s_split_) {
    const double v = std::sin(0.5 * kPi * tau(s) / tau_plus);
    return v * v;
  }
  const double c = std::cos(0.5 * kPi * sigma(le_.xi1 - s) / tau_plus);
  return c * c;
}

double Equilibrium::s_of_tau(double target) const {
  double lo = 0.0, hi = s_split_;
  double s = std::min(target, hi);
  for (int it = 0; it < 100; ++it) {
    const double f = tau(s) - target;
    if (f > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double th = theta_at(s, le_.xi1 - s).first;
    if (!(th > 0.0) || !std::isfinite(f)) throw InversionFailed("travel time lost monotonicity");
    double next = s - f * std::sqrt(th);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step <= 1e-15 * s || hi - lo <= 1e-16 * hi) return s;
  }
  throw InversionFailed("inversion of tau(s) did not converge");
}

double Equilibrium::u_of_sigma(double target) const {
  double lo = 0.0, hi = u_split_;
  double u = std::min(target * 0.5 * std::sqrt(surface_[0]), hi);
  for (int it = 0; it < 100; ++it) {
    const double f = sigma_of_u(u) - target;
    if (f > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double q = theta_over_w(u * u);
    if (!(q > 0.0) || !std::isfinite(f)) throw InversionFailed("surface travel time lost monotonicity");
    double next = u - f * 0.5 * std::sqrt(q);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 1e-15 * u || hi - lo <= 1e-16 * hi) return u;
  }
  throw InversionFailed("inversion of sigma(u) did not converge");
}

std::pair<double, double> Equilibrium::s_of_x(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "x = " << x << " outside [0, 1]";
    throw InversionFailed(msg.str());
  }
  const double xi1 = le_.xi1;
  if (x == 0.0) return {0.0, xi1};
  if (x == 1.0) return {xi1, 0.0};
  const double v = std::sin(0.5 * kPi * tau_split_ / tau_plus);
  if (x <= v * v) {
    const double s = s_of_tau(2.0 * tau_plus / kPi * std::asin(std::sqrt(x)));
    return {s, xi1 - s};
  }
  const double u = u_of_sigma(2.0 * tau_plus / kPi * std::asin(std::sqrt(1.0 - x)));
  const double w = u * u;
  return {xi1 - w, w};
}

ProfilePoint Equilibrium::at_x(double x) const {
  const auto [s, w] = s_of_x(x);
  return point(x, s, w);
}

ProfilePoint Equilibrium::point(double x, double s, double w) const {
  const double g = params_.gamma, n = params_.n_index, rc = params_.rho_c;
  const int ni = params_.index();
  const double half_N = params_.half_N();
  ProfilePoint p;
  p.x = x;
  p.s = s;
  p.w = w;
  std::tie(p.theta, p.dtheta) = theta_at(s, w);
  if (s == 0.0) {
    p.theta = 1.0;
    p.dtheta = 0.0;
  }
  if (w == 0.0) p.theta = 0.0;
  const double th = p.theta;

  p.r = alpha * s;
  p.depth = alpha * w;
  p.rho = rc * ipow(th, ni);
  p.P = params_.A * std::pow(rc, g) * ipow(th, ni + 1);
  p.drhodr = rc * n * ipow(th, ni - 1) * p.dtheta / alpha;
  p.dPdr = params_.A * g * std::pow(rc, g) * n * ipow(th, ni) * p.dtheta / alpha;
  p.mass = 4.0 * kPi * rc * alpha * alpha * alpha * (-s * s * p.dtheta);

  const double sx = std::sqrt(x), sx1 = std::sqrt(1.0 - x);
  // sqrt((1 - x)/theta), s / sqrt(x) and theta'/s with their endpoint limits.
  const double ratio1 = w == 0.0 ? kPi / (tau_plus * surface_[0])
                                 : sx1 / (std::sqrt(w) * std::sqrt(th / w));
  const double hs = s == 0.0 ? 2.0 * tau_plus / kPi : s / sx;
  const double dts = s == 0.0 ? -1.0 / 3.0 : p.dtheta / s;

  p.b = 0.5 * (1.0 - 2.0 * x) +
        tau_plus / kPi * (4.0 * std::sqrt(th) * sx1 / hs + (n + 0.5) * p.dtheta * sx * ratio1);
  p.L1 = 2.5 * (1.0 - x) - half_N * x - p.b;
  p.L0 = (4.0 - 3.0 * g) * n * tau_plus * tau_plus * dts / (kPi * kPi);
  p.weight_ratio = std::pow(hs, 4) * std::pow(ratio1, -(2.0 * n + 1.0));
  p.c_grav = 4.0 * kPi * params_.g0 * rc * dts;
  p.c_press = s == 0.0 ? std::numeric_limits<double>::infinity()
                       : params_.A * params_.K() * rc * th / (s * s);
  p.v_factor = kPi / tau_plus * s * sx * ratio1;
  p.drdx = x == 0.0 ? std::numeric_limits<double>::infinity()
                    : alpha * tau_plus / kPi / (sx * ratio1);
  return p;
}

double Equilibrium::liouville_xi(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = std::min(r / alpha, le_.xi1);
  return alpha / cbar * tau(s);
}

double Equilibrium::potential_tau(double t) const {
  const double v = std::sin(0.5 * kPi * t / tau_plus);
  const auto p = at_x(v * v);
  const double g = params_.gamma, n = params_.n_index;
  return 2.0 * p.theta / (p.s * p.s) + 0.5 * (7.0 - 3.0 * g) * n * p.dtheta / p.s -
         0.25 * (1.0 + g) * n * std::pow(p.theta, n) +
         (g + 1.0) * (3.0 - g) / 16.0 * n * n * p.dtheta * p.dtheta / p.theta;
}

double Equilibrium::inner_product_scale() const {
  return params_.rho_c * std::pow(alpha, 5) * tau_plus / kPi;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Equilibrium> make_equilibrium(const GasParams& params, double lane_emden_tol) {
  auto le = solve_lane_emden(params, lane_emden_tol);
  const double alpha = std::pow(params.rho_c, (params.gamma - 2.0) / 2.0) / std::sqrt(params.K());
  const auto bs = boundary_series(params, le, alpha * le.xi1, 16);
  return std::make_shared<const Equilibrium>(params, std::move(le), bs);
}

namespace {

EquilibriumProfile sample(std::shared_ptr<const Equilibrium> eq, const Eigen::VectorXd& x_nodes) {
  EquilibriumProfile out;
  out.params = eq->params();
  out.R = eq->R;
  out.M = eq->M;
  out.rho1 = eq->rho1;
  out.kappa = eq->kappa;
  out.xi_plus = eq->xi_plus;
  out.x_nodes = x_nodes;
  const auto n = x_nodes.size();
  for (auto* v : {&out.r_of_x, &out.rho_of_x, &out.P_of_x, &out.dPdr_of_x, &out.m_of_x, &out.L0,
                  &out.L1, &out.c_grav, &out.c_press, &out.weight_ratio, &out.v_factor, &out.depth}) {
    v->resize(n);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto p = eq->at_x(x_nodes[i]);
    out.r_of_x[i] = p.r;
    out.rho_of_x[i] = p.rho;
    out.P_of_x[i] = p.P;
    out.dPdr_of_x[i] = p.dPdr;
    out.m_of_x[i] = p.mass;
    out.L0[i] = p.L0;
    out.L1[i] = p.L1;
    out.c_grav[i] = p.c_grav;
    out.c_press[i] = p.c_press;
    out.weight_ratio[i] = p.weight_ratio;
    out.v_factor[i] = p.v_factor;
    out.depth[i] = p.depth;
  }
  out.eq = std::move(eq);
  return out;
}

}  // namespace

EquilibriumProfile build_equilibrium(const GasParams& params, const LaneEmdenSolution& le,
                                     const BoundarySeries& bs, const Eigen::VectorXd& x_nodes) {
  return sample(std::make_shared<const Equilibrium>(params, le, bs), x_nodes);
}

EquilibriumProfile build_equilibrium(const GasParams& params, const Eigen::VectorXd& x_nodes) {
  return sample(make_equilibrium(params), x_nodes);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> coefficients(const EquilibriumProfile& profile) {
  return {profile.L0, profile.L1};
}

double liouville_xi(const EquilibriumProfile& profile, double r) {
  return profile.eq->liouville_xi(r);
}

Eigen::VectorXd potential_q(const EquilibriumProfile& profile, const Eigen::VectorXd& xi) {
  const auto& eq = *profile.eq;
  const double to_tau = eq.cbar / eq.alpha;
  Eigen::VectorXd q(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    q[i] = to_tau * to_tau * eq.potential_tau(xi[i] * to_tau);
  }
  return q;
}

}  // namespace starpulse
