#pragma once

// Orthonormal Jacobi polynomials and Gauss-Jacobi quadrature on [0, 1] for
// the weight x^alpha (1-x)^beta.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace starpulse::jacobi {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
template <typename Scalar>
Scalar beta_function(Scalar a, Scalar b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Three-term recurrence of the orthonormal family:
///   sqrt(b_{k+1}) p_{k+1} = (x - a_k) p_k - sqrt(b_k) p_{k-1}.
template <typename Scalar>
struct Recurrence {
  Scalar alpha{}, beta{};  ///< exponents at x = 0 and x = 1
  Vector<Scalar> a;        ///< diagonal a_0..a_{n-1}
  Vector<Scalar> sqrt_b;   ///< sqrt(b_0)..sqrt(b_n); sqrt_b[0] is unused
  Scalar mu0{};            ///< integral of the weight

  Recurrence(Scalar alpha_, Scalar beta_, Eigen::Index n) : alpha(alpha_), beta(beta_) {
    if (!(alpha > Scalar(-1) && beta > Scalar(-1))) throw std::domain_error("jacobi: exponents must exceed -1");
    // Standard [-1,1] family with (1-t)^ja (1+t)^jb, mapped by x = (1+t)/2.
    const Scalar ja = beta, jb = alpha, s = ja + jb;
    a.resize(n);
    sqrt_b.resize(n + 1);
    sqrt_b[0] = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Scalar kk = Scalar(k);
      Scalar at;
      if (k == 0) {
        at = (jb - ja) / (s + 2);
      } else {
        at = (jb * jb - ja * ja) / ((2 * kk + s) * (2 * kk + s + 2));
      }
      a[k] = (at + 1) / 2;
    }
    for (Eigen::Index k = 1; k <= n; ++k) {
      const Scalar kk = Scalar(k);
      const Scalar two = 2 * kk + s;
      Scalar bt;
      if (k == 1) {
        bt = 4 * (1 + ja) * (1 + jb) / ((2 + s) * (2 + s) * (3 + s));
      } else {
        bt = 4 * kk * (kk + ja) * (kk + jb) * (kk + s) / (two * two * (two + 1) * (two - 1));
      }
      sqrt_b[k] = std::sqrt(bt / 4);
    }
    mu0 = beta_function(alpha + 1, beta + 1);
  }
};

/// Values, first and second derivatives of p_0..p_{n-1} at the points `x`;
/// each output is (points x n).
template <typename Scalar>
struct BasisTable {
  Matrix<Scalar> value, d1, d2;
};

template <typename Scalar>
BasisTable<Scalar> evaluate(const Recurrence<Scalar>& rec, const Vector<Scalar>& x, Eigen::Index n) {
  if (rec.a.size() < n) throw std::out_of_range("jacobi::evaluate: recurrence too short");
  BasisTable<Scalar> t;
  t.value.resize(x.size(), n);
  t.d1.resize(x.size(), n);
  t.d2.resize(x.size(), n);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Scalar pm = 0, p = 1 / std::sqrt(rec.mu0);
    Scalar dpm = 0, dp = 0, ddpm = 0, ddp = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      t.value(i, k) = p;
      t.d1(i, k) = dp;
      t.d2(i, k) = ddp;
      if (k + 1 == n) break;
      const Scalar c = x[i] - rec.a[k];
      const Scalar inv = 1 / rec.sqrt_b[k + 1];
      const Scalar pn = (c * p - rec.sqrt_b[k] * pm) * inv;
      const Scalar dpn = (c * dp + p - rec.sqrt_b[k] * dpm) * inv;
      const Scalar ddpn = (c * ddp + 2 * dp - rec.sqrt_b[k] * ddpm) * inv;
      pm = p;
      p = pn;
      dpm = dp;
      dp = dpn;
      ddpm = ddp;
      ddp = ddpn;
    }
  }
  return t;
}

/// Value and derivative of p_n at a single point (used for node polishing).
template <typename Scalar>
std::pair<Scalar, Scalar> value_and_derivative(const Recurrence<Scalar>& rec, Scalar x, Eigen::Index n) {
  Scalar pm = 0, p = 1 / std::sqrt(rec.mu0), dpm = 0, dp = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar c = x - rec.a[k];
    const Scalar inv = 1 / rec.sqrt_b[k + 1];
    const Scalar pn = (c * p - rec.sqrt_b[k] * pm) * inv;
    const Scalar dpn = (c * dp + p - rec.sqrt_b[k] * dpm) * inv;
    pm = p;
    p = pn;
    dpm = dp;
    dp = dpn;
  }
  return {p, dp};
}

template <typename Scalar>
struct Rule {
  Vector<Scalar> nodes;    ///< ascending, in (0, 1)
  Vector<Scalar> weights;  ///< positive, summing to the weight integral
};

/// n-point Gauss-Jacobi rule: Golub-Welsch, Newton-polished nodes, and
/// Christoffel weights. Exact for polynomials of degree <= 2n - 1.
template <typename Scalar>
Rule<Scalar> gauss_jacobi(Scalar alpha, Scalar beta, Eigen::Index n) {
  if (n < 1) throw std::domain_error("gauss_jacobi: n >= 1 required");
  const Recurrence<Scalar> rec(alpha, beta, n + 1);
  Matrix<Scalar> J = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    J(k, k) = rec.a[k];
    if (k + 1 < n) J(k, k + 1) = J(k + 1, k) = rec.sqrt_b[k + 1];
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(J, Eigen::EigenvaluesOnly);
  Rule<Scalar> rule;
  rule.nodes = es.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar xi = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = value_and_derivative(rec, xi, n);
      if (dp == Scalar(0)) break;
      xi -= p / dp;
    }
    rule.nodes[i] = xi;
  }
  const auto table = evaluate(rec, rule.nodes, n);
  rule.weights = table.value.rowwise().squaredNorm().cwiseInverse();
  return rule;
}

/// n-point Gauss-Legendre rule on [lo, hi].
template <typename Scalar>
Rule<Scalar> gauss_legendre(Eigen::Index n, Scalar lo = 0, Scalar hi = 1) {
  Rule<Scalar> r = gauss_jacobi<Scalar>(0, 0, n);
  r.nodes = (lo + (hi - lo) * r.nodes.array()).matrix();
  r.weights *= (hi - lo);
  return r;
}

}  // namespace starpulse::jacobi
