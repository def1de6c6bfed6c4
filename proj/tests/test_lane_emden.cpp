#include <doctest.h>

#include <cmath>
#include <numbers>

#include "starpulse/errors.hpp"
#include "starpulse/gas.hpp"
#include "starpulse/jacobi.hpp"
#include "starpulse/lane_emden.hpp"

using namespace starpulse;
using std::numbers::pi;

namespace {

// Reference zeros and mass coefficients from a 30-digit Taylor-series
// integration (mpmath odefun), independent of this library.
struct Reference {
  double gamma, xi1, mu1;
};
constexpr Reference kReference[] = {
    {2.0, 3.14159265358979324, 3.14159265358979324},
    {1.5, 4.35287459594612468, 2.41104601209689378},
    {4.0 / 3.0, 6.89684861937696038, 2.01823595096622840},
    {1.25, 14.9715463488380951, 1.79722991443924996},
};

}  // namespace

TEST_CASE("gas parameters accept only the four admissible exponents") {
  const auto p = GasParams::make(4.0 / 3.0);
  CHECK(p.n_index == 3.0);
  CHECK(p.N == 8.0);
  CHECK(p.half_N() == 4);
  CHECK(p.A == doctest::Approx(0.75));
  CHECK(p.K() == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(GasParams::make(1.7), InvalidParams);
  CHECK_THROWS_AS(GasParams::make(1.2), InvalidParams);
  CHECK_THROWS_AS(GasParams::make(2.0, -1.0), InvalidParams);
  CHECK(parse_gamma("4/3") == doctest::Approx(4.0 / 3.0));
  CHECK(parse_gamma("1.25") == 1.25);
  CHECK_THROWS_AS(parse_gamma("x"), InvalidParams);
  try {
    GasParams::make(1.7);
  } catch (const InvalidParams& e) {
    CHECK(std::string(e.what()).find("{2, 1.5, 1.333..., 1.25}") != std::string::npos);
  }
}

TEST_CASE("center series coefficients") {
  const auto a2 = center_series(GasParams::make(2.0), 2);
  CHECK(a2[0] == 1.0);
  CHECK(a2[1] == doctest::Approx(-1.0 / 6.0));
  CHECK(a2[2] == doctest::Approx(1.0 / 120.0));
  const auto sinc = center_series(GasParams::make(2.0), 6);
  double fact = 1.0;
  for (int k = 1; k <= 6; ++k) {
    fact *= (2 * k) * (2 * k + 1);
    CHECK(sinc[k] == doctest::Approx((k % 2 ? -1.0 : 1.0) / fact).epsilon(1e-14));
  }
  const auto a3 = center_series(GasParams::make(4.0 / 3.0), 2);
  CHECK(a3[1] == doctest::Approx(-1.0 / 6.0));
  CHECK(a3[2] == doctest::Approx(1.0 / 40.0));
  for (double g : kAdmissibleGammas) CHECK(center_series(GasParams::make(g), 1)[1] == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("Lane-Emden zeros match the independent reference") {
  for (const auto& ref : kReference) {
    const auto le = solve_lane_emden(GasParams::make(ref.gamma), 1e-12);
    CAPTURE(ref.gamma);
    CHECK(std::abs(le.xi1 - ref.xi1) < 1e-9);
    CHECK(std::abs(le.mu1 - ref.mu1) < 1e-9);
    CHECK(le.theta[0] == 1.0);
    CHECK(le.dtheta[0] == 0.0);
    CHECK(le.theta[le.theta.size() - 1] == 0.0);
    CHECK(le.mu1 > 0.0);
  }
}

TEST_CASE("index 5 has no finite zero") {
  CHECK_THROWS_AS(solve_lane_emden(5.0), NoZeroFound);
}

TEST_CASE("gamma = 2 reproduces sin(xi)/xi") {
  const double tol = 1e-12;
  const auto le = solve_lane_emden(GasParams::make(2.0), tol);
  double worst = 0.0;
  for (Eigen::Index i = 1; i < le.xi_grid.size(); ++i) {
    const double s = le.xi_grid[i];
    worst = std::max(worst, std::abs(le.theta[i] - std::sin(s) / s));
  }
  CHECK(worst <= 10 * tol);
  for (double s : {0.0005, 0.7, 2.2, 3.1}) {
    const auto [th, dth] = le.eval(s);
    CHECK(std::abs(th - std::sin(s) / s) <= 10 * tol);
    CHECK(std::abs(dth - (std::cos(s) / s - std::sin(s) / (s * s))) <= 10 * tol);
  }
}

TEST_CASE("profile is positive, decreasing and satisfies the integrated equation") {
  const double tol = 1e-12;
  const auto gl = jacobi::gauss_legendre<double>(10);
  for (double g : kAdmissibleGammas) {
    const auto p = GasParams::make(g);
    const auto le = solve_lane_emden(p, tol);
    CAPTURE(g);
    for (Eigen::Index i = 1; i < le.xi_grid.size(); ++i) {
      CHECK(le.dtheta[i] < 0.0);
      if (i + 1 < le.xi_grid.size()) CHECK(le.theta[i] > 0.0);
      CHECK(le.xi_grid[i] > le.xi_grid[i - 1]);
    }
    // s^2 theta'(s) + int_0^s t^2 theta^n dt = 0 and theta(s) = 1 + int_0^s theta'
    double mass = 0.0, integral_dtheta = 0.0, worst_flux = 0.0, worst_theta = 0.0;
    for (Eigen::Index i = 0; i + 1 < le.xi_grid.size(); ++i) {
      const double a = le.xi_grid[i], b = le.xi_grid[i + 1];
      for (Eigen::Index q = 0; q < gl.nodes.size(); ++q) {
        const double s = a + (b - a) * gl.nodes[q];
        const auto [th, dth] = le.eval(s);
        mass += (b - a) * gl.weights[q] * s * s * std::pow(th, p.n_index);
        integral_dtheta += (b - a) * gl.weights[q] * dth;
      }
      worst_flux = std::max(worst_flux, std::abs(b * b * le.dtheta[i + 1] + mass));
      worst_theta = std::max(worst_theta, std::abs(1.0 + integral_dtheta - le.theta[i + 1]));
    }
    CHECK(worst_flux <= 10 * tol * std::max(1.0, le.mu1));
    CHECK(worst_theta <= 10 * tol);
    CHECK(std::abs(mass - le.mu1) <= 10 * tol * le.mu1);
  }
}

TEST_CASE("zeros are stable under tolerance halving") {
  for (double g : {1.5, 4.0 / 3.0, 1.25}) {
    const auto a = solve_lane_emden(GasParams::make(g), 1e-12);
    const auto b = solve_lane_emden(GasParams::make(g), 5e-13);
    CHECK(std::abs(a.xi1 - b.xi1) < 1e-8);
    CHECK(std::abs(a.mu1 - b.mu1) < 1e-8);
  }
}

TEST_CASE("surface Taylor series agrees with the integrated profile") {
  for (double g : kAdmissibleGammas) {
    const auto le = solve_lane_emden(GasParams::make(g), 1e-12);
    const auto c = le.surface_taylor(16);
    for (double w : {1e-3, 1e-2, 5e-2}) {
      double v = 0.0;
      for (Eigen::Index k = c.size() - 1; k >= 0; --k) v = v * w + c[k];
      const double th = le.eval(le.xi1 - w).first;
      CHECK(std::abs(v - th) <= 1e-9 * th);
    }
  }
}

TEST_CASE("boundary series structure and leading terms") {
  // (0,1) term of f is -1/((m+1)(m+2)).
  for (int m : {1, 2, 3, 4}) {
    const auto g = boundary_series_structure(m, 3 * (m + 1));
    CHECK(g(1, 0) == 1.0);
    for (Eigen::Index p = 1; p < g.rows(); ++p) CHECK(g(p, 0) == 1.0);
    CHECK(g(m + 2, 1) == doctest::Approx(-1.0 / ((m + 1.0) * (m + 2.0))));
    for (Eigen::Index p = 0; p < g.rows(); ++p) {
      for (Eigen::Index k = 1; k < g.cols(); ++k) {
        if (p < k * (m + 1) + 1) CHECK(g(p, k) == 0.0);
      }
    }
  }

  const auto p = GasParams::make(1.5);
  const auto le = solve_lane_emden(p, 1e-12);
  const double alpha = std::pow(p.rho_c, (p.gamma - 2) / 2) / std::sqrt(p.K());
  const double R = alpha * le.xi1;
  const auto bs = boundary_series(p, le, R, 6);
  // Coefficient of (R-r)^(gamma/(gamma-1)) relative to C (R - r): with
  // C = C3 / R and K C = K C3 / R the stated value is -K C / 12 for gamma = 3/2.
  const double C = bs.C3 / R;
  const double stated_coeff = -std::pow(p.gamma - 1, 2) * p.K() *
                              std::pow(C, (2 - p.gamma) / (p.gamma - 1)) /
                              (p.gamma * (2 * p.gamma - 1));
  CHECK(stated_coeff == doctest::Approx(-p.K() * C / 12.0));
  // term (0,1) multiplies C' z^(m+1) = C' (R - r)^(m+1) / R^(m+1).
  const double ours = bs.terms(0, 1) * bs.Cprime / std::pow(R, bs.m + 1);
  CHECK(ours == doctest::Approx(stated_coeff).epsilon(1e-9));
  CHECK(bs.terms(1, 0) == 1.0);
  CHECK(bs.terms(0, 0) == 1.0);
}

TEST_CASE("boundary series fit recovers the closed-form constant") {
  for (double g : kAdmissibleGammas) {
    for (double rho_c : {1.0, 2.5}) {
      const auto p = GasParams::make(g, rho_c);
      const auto le = solve_lane_emden(p, 1e-12);
      const double alpha = std::pow(rho_c, (g - 2) / 2) / std::sqrt(p.K());
      const double R = alpha * le.xi1;
      const auto bs = boundary_series(p, le, R, 16);
      CAPTURE(g);
      const double c3 = std::pow(rho_c, g - 1) * le.mu1 / le.xi1;
      CHECK(bs.C3 == doctest::Approx(c3).epsilon(1e-9));
      CHECK(bs.fit_residual < 1e-9);
      // C' is dimensionless and independent of rho_c.
      CHECK(bs.Cprime == doctest::Approx(le.xi1 * le.xi1 * std::pow(le.mu1 / le.xi1, bs.m - 1)).epsilon(1e-9));
      for (double z : {1e-3, 5e-3, 1e-2}) {
        const double u = std::pow(rho_c, g - 1) * le.eval(le.xi1 * (1 - z)).first;
        CHECK(bs.U(z).first == doctest::Approx(u).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("gamma = 2 boundary series is the sine profile") {
  const auto p = GasParams::make(2.0);
  const auto le = solve_lane_emden(p, 1e-12);
  const double R = le.xi1 / std::sqrt(p.K());
  const auto bs = boundary_series(p, le, R, 14);
  CHECK(bs.Cprime == doctest::Approx(pi * pi).epsilon(1e-10));
  for (double z : {0.01, 0.05, 0.1}) {
    const double f = std::sin(pi * z) / (pi * z * (1 - z));
    CHECK(bs.U(z).first / (bs.C3 * z) == doctest::Approx(f).epsilon(1e-9));
  }
  // rho = rho_1 (R - r)(1 + (R - r)/R + ...): the z^1 coefficient of f is 1.
  CHECK(bs.collapse()[1] == doctest::Approx(1.0));
}

TEST_CASE("order zero keeps the leading term only") {
  const auto p = GasParams::make(1.5);
  const auto le = solve_lane_emden(p, 1e-12);
  const double R = std::pow(p.rho_c, -0.25) / std::sqrt(p.K()) * le.xi1;
  const auto bs = boundary_series(p, le, R, 0);
  CHECK(bs.U(0.01).first == doctest::Approx(bs.C3 * 0.01));
  CHECK(bs.terms(1, 0) == 0.0);
  CHECK(bs.term_map().size() == 1);
}

TEST_CASE("truncated series error is bounded by the first omitted term") {
  const auto p = GasParams::make(4.0 / 3.0);
  const auto le = solve_lane_emden(p, 1e-12);
  const double R = std::pow(p.rho_c, -1.0 / 3.0) / std::sqrt(p.K()) * le.xi1;
  const auto full = boundary_series(p, le, R, 16);
  for (int order : {2, 4, 6}) {
    const auto bs = boundary_series(p, le, R, order);
    const auto fc = full.collapse();
    for (double z : {2e-3, 1e-2}) {
      const double u = std::pow(p.rho_c, p.gamma - 1) * le.eval(le.xi1 * (1 - z)).first;
      const double omitted = std::abs(full.C3 * fc[order + 1]) * std::pow(z, order + 2);
      // The tail is geometric with ratio z, so it exceeds its first term by 1/(1-z).
      CHECK(std::abs(bs.U(z).first - u) <= omitted / (1 - z) + 1e-12 * u);
    }
  }
}
