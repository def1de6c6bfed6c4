#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the 4th-order
// continuous extension of Hairer, Norsett & Wanner (DOPRI5).

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace starpulse::ode {

template <typename Scalar, int Dim>
using State = Eigen::Matrix<Scalar, Dim, 1>;

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  ///< 0 selects an automatic first step
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// Continuous output over one accepted step [x0, x0 + h].
template <typename Scalar, int Dim>
struct DenseSegment {
  Scalar x0{};
  Scalar h{};
  State<Scalar, Dim> r1, r2, r3, r4, r5;

  State<Scalar, Dim> operator()(Scalar x) const {
    const Scalar th = (x - x0) / h;
    const Scalar th1 = Scalar(1) - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

template <typename Scalar, int Dim>
struct StepResult {
  State<Scalar, Dim> y;    ///< 5th-order solution at x + h
  State<Scalar, Dim> k7;   ///< f(x + h, y), reusable as the next k1 (FSAL)
  State<Scalar, Dim> err;  ///< embedded error estimate
  DenseSegment<Scalar, Dim> dense;
};

/// One DOPRI5 step of size h (h may be negative). `k1` must equal f(x, y).
template <typename Scalar, int Dim, typename F>
StepResult<Scalar, Dim> dopri5_step(const F& f, Scalar x, const State<Scalar, Dim>& y,
                                    const State<Scalar, Dim>& k1, Scalar h) {
  using S = State<Scalar, Dim>;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                   a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                   a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                   a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                   a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  constexpr Scalar d1 = Scalar(-12715105075.0) / Scalar(11282082432.0),
                   d3 = Scalar(87487479700.0) / Scalar(32700410799.0),
                   d4 = Scalar(-10690763975.0) / Scalar(1880347072.0),
                   d5 = Scalar(701980252875.0) / Scalar(199316789632.0),
                   d6 = Scalar(-1453857185.0) / Scalar(822651844.0),
                   d7 = Scalar(69997945.0) / Scalar(29380423.0);

  const S k2 = f(x + h / 5, S(y + h * a21 * k1));
  const S k3 = f(x + h * Scalar(3) / 10, S(y + h * (a31 * k1 + a32 * k2)));
  const S k4 = f(x + h * Scalar(4) / 5, S(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const S k5 = f(x + h * Scalar(8) / 9, S(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const S k6 = f(x + h, S(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));

  StepResult<Scalar, Dim> out;
  out.y = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  out.k7 = f(x + h, out.y);
  out.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k7);

  auto& d = out.dense;
  d.x0 = x;
  d.h = h;
  d.r1 = y;
  d.r2 = out.y - y;
  d.r3 = h * k1 - d.r2;
  d.r4 = d.r2 - h * out.k7 - d.r3;
  d.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * out.k7);
  return out;
}

/// RMS error norm scaled by atol + rtol * max(|y0|, |y1|).
template <typename Scalar, int Dim>
Scalar error_norm(const State<Scalar, Dim>& err, const State<Scalar, Dim>& y0,
                  const State<Scalar, Dim>& y1, const Tolerance& tol) {
  const auto scale =
      (Scalar(tol.atol) + Scalar(tol.rtol) * y0.array().abs().max(y1.array().abs())).eval();
  return std::sqrt((err.array() / scale).square().mean());
}

/// Accepted-step record handed to observers.
template <typename Scalar, int Dim>
struct AcceptedStep {
  Scalar x0, h;
  State<Scalar, Dim> y0, y1, k1;
  const DenseSegment<Scalar, Dim>* dense;
};

template <typename Scalar, int Dim>
struct IntegrationResult {
  Scalar x;
  State<Scalar, Dim> y;
  std::size_t steps = 0;
  bool stopped = false;  ///< true when the observer requested termination
};

/// Adaptive integration from x0 towards x_end. `observer(const AcceptedStep&)`
/// is called after every accepted step and may return false to stop.
template <typename Scalar, int Dim, typename F, typename Observer>
IntegrationResult<Scalar, Dim> integrate(const F& f, Scalar x0, State<Scalar, Dim> y0,
                                         Scalar x_end, const Tolerance& tol,
                                         Observer&& observer) {
  using S = State<Scalar, Dim>;
  const Scalar span = x_end - x0;
  const Scalar dir = span >= 0 ? Scalar(1) : Scalar(-1);
  IntegrationResult<Scalar, Dim> res{x0, y0, 0, false};
  if (span == Scalar(0)) return res;

  S k1 = f(x0, y0);
  Scalar h = tol.h_init;
  if (h == Scalar(0)) {
    // Hairer's starting-step heuristic, first-order variant.
    const auto sc = (Scalar(tol.atol) + Scalar(tol.rtol) * y0.array().abs()).eval();
    const Scalar d0 = std::sqrt((y0.array() / sc).square().mean());
    const Scalar d1 = std::sqrt((k1.array() / sc).square().mean());
    h = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    h = std::min<Scalar>(h, std::abs(span));
  }
  h = dir * std::min<Scalar>(std::abs(h), Scalar(tol.h_max));

  Scalar x = x0;
  S y = y0;
  while (res.steps < tol.max_steps) {
    bool last = false;
    if (dir * (x + h - x_end) >= 0) {
      h = x_end - x;
      last = true;
    }
    const auto step = dopri5_step<Scalar, Dim>(f, x, y, k1, h);
    const Scalar en = error_norm<Scalar, Dim>(step.err, y, step.y, tol);
    if (!std::isfinite(en)) {
      h *= Scalar(0.25);
      continue;
    }
    if (en <= Scalar(1)) {
      const AcceptedStep<Scalar, Dim> rec{x, h, y, step.y, k1, &step.dense};
      ++res.steps;
      x = last ? x_end : x + h;
      y = step.y;
      k1 = step.k7;
      if (!observer(rec)) {
        res.stopped = true;
        break;
      }
      if (last) break;
      const Scalar fac = en == Scalar(0) ? Scalar(5) : Scalar(0.9) * std::pow(en, Scalar(-0.2));
      h *= std::clamp<Scalar>(fac, Scalar(0.2), Scalar(5));
    } else {
      const Scalar fac = Scalar(0.9) * std::pow(en, Scalar(-0.2));
      h *= std::max<Scalar>(fac, Scalar(0.1));
    }
    h = dir * std::min<Scalar>(std::abs(h), Scalar(tol.h_max));
    if (std::abs(h) < std::numeric_limits<Scalar>::epsilon() * std::max<Scalar>(Scalar(1), std::abs(x))) {
      break;
    }
  }
  res.x = x;
  res.y = y;
  return res;
}

template <typename Scalar, int Dim, typename F>
IntegrationResult<Scalar, Dim> integrate(const F& f, Scalar x0, State<Scalar, Dim> y0,
                                         Scalar x_end, const Tolerance& tol) {
  return integrate<Scalar, Dim>(f, x0, std::move(y0), x_end, tol,
                                [](const AcceptedStep<Scalar, Dim>&) { return true; });
}

}  // namespace starpulse::ode
