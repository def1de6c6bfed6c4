#include "starpulse/lane_emden.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "starpulse/errors.hpp"
#include "starpulse/ode.hpp"
#include "starpulse/series.hpp"

namespace starpulse {

namespace {

using State = ode::State<double, 2>;

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

double power_index(double theta, double n) {
  if (is_integer(n)) {
    const int k = static_cast<int>(std::lround(n));
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= theta;
    return r;
  }
  return theta > 0.0 ? std::pow(theta, n) : 0.0;
}

struct LaneEmdenRhs {
  double n;
  State operator()(double s, const State& y) const {
    State d;
    d[0] = y[1];
    d[1] = -2.0 * y[1] / s - power_index(y[0], n);
    return d;
  }
};

// Product of bivariate coefficient arrays indexed (power of z, power of C').
Eigen::MatrixXd bivariate_mul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Eigen::Index p1 = 0; p1 < a.rows(); ++p1) {
    for (Eigen::Index k1 = 0; k1 < a.cols(); ++k1) {
      if (a(p1, k1) == 0.0) continue;
      for (Eigen::Index p2 = 0; p1 + p2 < a.rows(); ++p2) {
        for (Eigen::Index k2 = 0; k1 + k2 < a.cols(); ++k2) c(p1 + p2, k1 + k2) += a(p1, k1) * b(p2, k2);
      }
    }
  }
  return c;
}

}  // namespace

Eigen::VectorXd center_series(double n_index, int order) {
  if (order < 0) throw InvalidParams("center_series: order must be non-negative");
  series::Coeffs<double> a = series::Coeffs<double>::Zero(order + 1);
  a[0] = 1.0;
  for (int k = 0; k < order; ++k) {
    // theta^n through degree k only needs a_0..a_k.
    const auto p = series::pow<double>(a.head(k + 1), n_index, k);
    a[k + 1] = -p[k] / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return a;
}

Eigen::VectorXd center_series(const GasParams& params, int order) {
  return center_series(params.n_index, order);
}

LaneEmdenSolution solve_lane_emden(double n_index, const LaneEmdenOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidParams("Lane-Emden tolerance must be positive");
  if (!(n_index >= 0.0)) throw InvalidParams("polytropic index must be non-negative");

  LaneEmdenSolution sol;
  sol.n_index = n_index;
  sol.tol = opts.tol;
  sol.center_ = center_series(n_index, std::max(opts.series_order, 4));
  sol.xi_start_ = opts.xi_start;

  const double s0 = opts.xi_start;
  double th0 = 0.0, dth0 = 0.0;
  for (Eigen::Index k = sol.center_.size() - 1; k >= 0; --k) th0 = th0 * s0 * s0 + sol.center_[k];
  for (Eigen::Index k = sol.center_.size() - 1; k >= 1; --k) {
    dth0 += 2.0 * k * sol.center_[k] * std::pow(s0, 2.0 * k - 1.0);
  }

  std::vector<double> xs{0.0, s0}, th{1.0, th0}, dth{0.0, dth0};
  const LaneEmdenRhs f{n_index};
  ode::Tolerance t;
  t.rtol = 0.1 * opts.tol;
  t.atol = 0.1 * opts.tol;
  t.h_max = 0.1;

  bool crossed = false;
  ode::AcceptedStep<double, 2> last{};
  State y0;
  y0 << th0, dth0;
  ode::integrate<double, 2>(f, s0, y0, opts.xi_max, t, [&](const ode::AcceptedStep<double, 2>& st) {
    if (st.y1[0] <= 0.0) {
      crossed = true;
      last = st;
      return false;
    }
    xs.push_back(st.x0 + st.h);
    th.push_back(st.y1[0]);
    dth.push_back(st.y1[1]);
    return true;
  });
  if (!crossed) {
    std::ostringstream msg;
    msg << "theta stays positive up to xi_max = " << opts.xi_max << " (n = " << n_index << ")";
    throw NoZeroFound(msg.str());
  }

  // Refine the zero inside the bracketing step with safeguarded Newton on an
  // exact single step from the left end of the bracket.
  auto at = [&](double s) {
    const auto r = ode::dopri5_step<double, 2>(f, last.x0, last.y0, last.k1, s - last.x0);
    return r.y;
  };
  double lo = last.x0, hi = last.x0 + last.h;
  double s = lo - last.y0[0] * (hi - lo) / (last.y1[0] - last.y0[0]);
  State ys = at(s);
  for (int it = 0; it < 100; ++it) {
    if (ys[0] > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    double next = s - ys[0] / ys[1];
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    ys = at(s);
    if (step <= 4e-16 * s) break;
  }

  sol.xi1 = s;
  sol.dtheta1 = ys[1];
  sol.mu1 = -s * s * ys[1];
  xs.push_back(s);
  th.push_back(0.0);
  dth.push_back(ys[1]);
  sol.xi_grid = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  sol.theta = Eigen::Map<Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size()));
  sol.dtheta = Eigen::Map<Eigen::VectorXd>(dth.data(), static_cast<Eigen::Index>(dth.size()));
  return sol;
}

LaneEmdenSolution solve_lane_emden(const GasParams& params, const LaneEmdenOptions& opts) {
  return solve_lane_emden(params.n_index, opts);
}

std::pair<double, double> LaneEmdenSolution::eval(double xi) const {
  if (xi < 0.0 || xi > xi1) throw std::domain_error("LaneEmdenSolution::eval outside [0, xi1]");
  if (xi == xi1) return {0.0, dtheta1};
  if (xi <= xi_start_) {
    const double t = xi * xi;
    double th = 0.0, dth = 0.0;
    for (Eigen::Index k = center_.size() - 1; k >= 0; --k) th = th * t + center_[k];
    for (Eigen::Index k = center_.size() - 1; k >= 1; --k) dth = dth * t + 2.0 * k * center_[k];
    return {th, dth * xi};
  }
  const auto* begin = xi_grid.data();
  const auto* end = begin + xi_grid.size() - 1;  // exclude the root node
  const auto k = static_cast<Eigen::Index>(std::upper_bound(begin + 1, end, xi) - begin) - 1;
  const LaneEmdenRhs f{n_index};
  State y;
  y << theta[k], dtheta[k];
  const double s = xi_grid[k];
  if (xi == s) return {y[0], y[1]};
  const auto r = ode::dopri5_step<double, 2>(f, s, y, f(s, y), xi - s);
  return {r.y[0], r.y[1]};
}

Eigen::VectorXd LaneEmdenSolution::surface_taylor(int order) const {
  if (!is_integer(n_index)) throw std::domain_error("surface_taylor needs an integer index");
  const int n = static_cast<int>(std::lround(n_index));
  series::Coeffs<double> c = series::Coeffs<double>::Zero(order + 1);
  if (order >= 1) c[1] = -dtheta1;
  for (int k = 0; k + 2 <= order; ++k) {
    const auto p = series::ipow<double>(c.head(k + 2), n, k);
    const double pk = p[k];
    const double pkm1 = k >= 1 ? p[k - 1] : 0.0;
    const double kk = (k + 1.0) * (k + 2.0);
    c[k + 2] = (kk * c[k + 1] - xi1 * pk + pkm1) / (xi1 * kk);
  }
  return c;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd boundary_series_structure(int m, int order) {
  if (m < 1) throw InvalidParams("boundary series needs m >= 1");
  if (order < 0) throw InvalidParams("boundary series order must be non-negative");
  const int P = order + 1;                   // highest power of z in g
  const int Kmax = std::max(0, (P - 1) / (m + 1));
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(P + 1, Kmax + 1);
  if (P >= 1) g(1, 0) = 1.0;
  for (int p = 0; p + 2 <= P; ++p) {
    // (1 - z) g^m, coefficient of z^p; depends on g up to z^(p+1).
    Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(P + 1, Kmax + 1);
    gm(0, 0) = 1.0;
    for (int i = 0; i < m; ++i) gm = bivariate_mul(gm, g);
    for (int k = 0; k <= Kmax; ++k) {
      double rhs = 0.0;
      if (k >= 1) {
        rhs = -(gm(p, k - 1) - (p >= 1 ? gm(p - 1, k - 1) : 0.0));
      }
      g(p + 2, k) = g(p + 1, k) + rhs / ((p + 1.0) * (p + 2.0));
    }
  }
  return g;
}

double BoundarySeries::terms(int j, int k) const {
  if (j < 0 || k < 0) return 0.0;
  const int p = j + k * (m + 1) + 1;
  if (p > order + 1 || p >= g.rows() || k >= g.cols()) return 0.0;
  return g(p, k);
}

std::map<std::pair<int, int>, double> BoundarySeries::term_map() const {
  std::map<std::pair<int, int>, double> out;
  for (Eigen::Index p = 1; p < g.rows(); ++p) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      if (g(p, k) == 0.0) continue;
      const int j = static_cast<int>(p) - 1 - static_cast<int>(k) * (m + 1);
      out[{j, static_cast<int>(k)}] = g(p, k);
    }
  }
  return out;
}

Eigen::VectorXd BoundarySeries::collapse() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(order + 1);
  for (int q = 0; q <= order; ++q) {
    double acc = 0.0, cp = 1.0;
    for (Eigen::Index k = 0; k < g.cols(); ++k, cp *= Cprime) acc += g(q + 1, k) * cp;
    f[q] = acc;
  }
  return f;
}

std::pair<double, double> BoundarySeries::U(double z) const {
  const auto f = collapse();
  const auto [fv, fd] = series::eval_with_derivative<double>(f, z);
  return {C3 * z * fv, C3 * (fv + z * fd)};
}

BoundarySeries boundary_series(const GasParams& params, const LaneEmdenSolution& le, double R,
                               int order, const BoundaryFitOptions& opts) {
  if (order < 0) throw InvalidParams("boundary series order must be non-negative");
  if (!(R > 0.0)) throw InvalidParams("boundary series needs R > 0");
  const int m = params.index();
  const double scale = std::pow(params.rho_c, params.gamma - 1.0);

  BoundarySeries fit;
  fit.m = m;
  fit.order = std::max(order, opts.fit_order);
  fit.g = boundary_series_structure(m, fit.order);

  const int ns = std::max(opts.samples, 2);
  Eigen::VectorXd z(ns), u(ns);
  for (int i = 0; i < ns; ++i) {
    z[i] = opts.z_lo * std::pow(opts.z_hi / opts.z_lo, static_cast<double>(i) / (ns - 1));
    u[i] = scale * le.eval(le.xi1 * (1.0 - z[i])).first;
  }

  auto shape = [&]() {
    const auto f = fit.collapse();
    Eigen::VectorXd h(ns);
    for (int i = 0; i < ns; ++i) h[i] = z[i] * series::eval<double>(f, z[i]);
    return h;
  };

  // Relative least squares; C' depends on C3 unless m = 1, hence the
  // fixed-point loop.
  fit.C3 = u[0] / z[0];
  const double KR2 = params.K() * R * R;
  for (int it = 0; it < 200; ++it) {
    fit.Cprime = KR2 * std::pow(fit.C3, m - 1);
    const Eigen::ArrayXd q = shape().array() / u.array();
    const double next = q.sum() / q.square().sum();
    const double change = std::abs(next - fit.C3);
    fit.C3 = next;
    if (change <= 1e-16 * std::abs(next)) break;
  }
  fit.Cprime = KR2 * std::pow(fit.C3, m - 1);
  const Eigen::ArrayXd rel = fit.C3 * shape().array() / u.array() - 1.0;
  fit.fit_residual = std::sqrt(rel.square().mean());
  if (!(fit.fit_residual <= opts.max_residual)) {
    std::ostringstream msg;
    msg << "boundary series misfit " << fit.fit_residual << " exceeds " << opts.max_residual;
    throw FitDiverged(msg.str());
  }

  BoundarySeries out = fit;
  out.order = order;
  out.g = boundary_series_structure(m, order);
  return out;
}

}  // namespace starpulse
