#pragma once

// Truncated power series sum_k c_k u^k stored as dense coefficient vectors.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starpulse::series {

template <typename Scalar>
using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Coefficient k of `a`, zero past the stored length.
template <typename Scalar>
Scalar at(const Coeffs<Scalar>& a, Eigen::Index k) {
  return (k >= 0 && k < a.size()) ? a[k] : Scalar(0);
}

/// Product truncated to degree `order`.
template <typename Scalar>
Coeffs<Scalar> mul(const Coeffs<Scalar>& a, const Coeffs<Scalar>& b, Eigen::Index order) {
  Coeffs<Scalar> c = Coeffs<Scalar>::Zero(order + 1);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(a.size(), order + 1); ++i) {
    if (a[i] == Scalar(0)) continue;
    for (Eigen::Index j = 0; j < b.size() && i + j <= order; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

template <typename Scalar>
Coeffs<Scalar> add(const Coeffs<Scalar>& a, const Coeffs<Scalar>& b) {
  Coeffs<Scalar> c = Coeffs<Scalar>::Zero(std::max(a.size(), b.size()));
  c.head(a.size()) += a;
  c.head(b.size()) += b;
  return c;
}

/// a^p for real p via J.C.P. Miller's recurrence; requires a_0 != 0.
template <typename Scalar>
Coeffs<Scalar> pow(const Coeffs<Scalar>& a, Scalar p, Eigen::Index order) {
  if (a.size() == 0 || a[0] == Scalar(0)) throw std::domain_error("series::pow needs a_0 != 0");
  Coeffs<Scalar> b = Coeffs<Scalar>::Zero(order + 1);
  b[0] = std::pow(a[0], p);
  for (Eigen::Index k = 1; k <= order; ++k) {
    Scalar acc = 0;
    for (Eigen::Index j = 1; j <= k; ++j) acc += (p * Scalar(j) - Scalar(k - j)) * at(a, j) * b[k - j];
    b[k] = acc / (Scalar(k) * a[0]);
  }
  return b;
}

/// a^p for a non-negative integer p by repeated multiplication (a_0 may vanish).
template <typename Scalar>
Coeffs<Scalar> ipow(const Coeffs<Scalar>& a, int p, Eigen::Index order) {
  Coeffs<Scalar> r = Coeffs<Scalar>::Zero(order + 1);
  r[0] = 1;
  for (int i = 0; i < p; ++i) r = mul(r, a, order);
  return r;
}

template <typename Scalar>
Coeffs<Scalar> derivative(const Coeffs<Scalar>& a) {
  if (a.size() <= 1) return Coeffs<Scalar>::Zero(1);
  Coeffs<Scalar> d(a.size() - 1);
  for (Eigen::Index k = 1; k < a.size(); ++k) d[k - 1] = Scalar(k) * a[k];
  return d;
}

/// (c0 + c1 u)^p expanded exactly.
template <typename Scalar>
Coeffs<Scalar> linear_power(Scalar c0, Scalar c1, int p) {
  Coeffs<Scalar> lin(2);
  lin << c0, c1;
  return ipow(lin, p, p);
}

/// Horner evaluation.
template <typename Scalar>
Scalar eval(const Coeffs<Scalar>& a, Scalar u) {
  Scalar s = 0;
  for (Eigen::Index k = a.size() - 1; k >= 0; --k) s = s * u + a[k];
  return s;
}

/// Value and first derivative at u.
template <typename Scalar>
std::pair<Scalar, Scalar> eval_with_derivative(const Coeffs<Scalar>& a, Scalar u) {
  Scalar s = 0, ds = 0;
  for (Eigen::Index k = a.size() - 1; k >= 0; --k) {
    ds = ds * u + s;
    s = s * u + a[k];
  }
  return {s, ds};
}

/// Regular Frobenius solution (y_0 = 1) of
///   u A(u) y'' + B(u) y' + C(u) y = 0
/// at a regular singular point whose nonzero exponent 1 - B_0/A_0 is
/// negative, so the recurrence never resonates.
template <typename Scalar>
Coeffs<Scalar> frobenius_regular(const Coeffs<Scalar>& A, const Coeffs<Scalar>& B,
                                 const Coeffs<Scalar>& C, Eigen::Index order) {
  if (A.size() == 0 || A[0] == Scalar(0)) throw std::domain_error("frobenius: A_0 must not vanish");
  Coeffs<Scalar> y = Coeffs<Scalar>::Zero(order + 1);
  y[0] = 1;
  for (Eigen::Index k = 0; k < order; ++k) {
    Scalar rest = 0;
    for (Eigen::Index j = 1; j <= k; ++j) {
      const Scalar m = Scalar(k - j + 1);
      rest += (at(A, j) * m * Scalar(k - j) + at(B, j) * m) * y[k - j + 1];
    }
    for (Eigen::Index j = 0; j <= k; ++j) rest += at(C, j) * y[k - j];
    const Scalar lead = Scalar(k + 1) * (Scalar(k) * A[0] + at(B, 0));
    if (lead == Scalar(0)) throw std::domain_error("frobenius: resonant exponent");
    y[k + 1] = -rest / lead;
  }
  return y;
}

}  // namespace starpulse::series
