#pragma once

namespace fbtrack::specfun {

/// First positive zero of J0.
inline constexpr double kJ0FirstZero = 2.404825557695772768622;

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| <= 8, Miller backward recurrence up to 25 and the
/// Hankel asymptotic expansion beyond. Absolute error is ~1e-15 everywhere.
/// Throws DomainError on non-finite input.
double bessel_j0(double x);

/// Modified Bessel function I_order(x) for order 0 or 1, x >= 0.
/// Overflows to +inf for x beyond ~713; use bessel_i_scaled there.
double bessel_i(int order, double x);

/// exp(-x) * I_order(x), finite for every x >= 0.
double bessel_i_scaled(int order, double x);

/// Mean resultant length of a von Mises law with concentration kappa:
/// A(kappa) = I1(kappa) / I0(kappa), in [0, 1).
double mrl_of_kappa(double kappa);

/// Derivative dA/dkappa = 1 - A/kappa - A^2 (1/2 at kappa = 0).
double mrl_derivative(double kappa);

/// Inverse of mrl_of_kappa on [0, 1). Residual |A(kappa) - rbar| < 1e-10.
double kappa_of_mrl(double rbar);

struct BesselRatio {
  double kappa = 0.0;
  double value = 0.0;  ///< I1(kappa)/I0(kappa)
};

inline BesselRatio bessel_ratio(double kappa) { return {kappa, mrl_of_kappa(kappa)}; }

/// Complete elliptic integrals in the parameter convention:
/// K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt, E(m) = int_0^{pi/2} (1 - m sin^2 t)^{1/2} dt.
struct EllipticKE {
  double K = 0.0;
  double E = 0.0;
};

/// Valid for every finite m <= 1 (negative m through the imaginary-modulus
/// transformation, then AGM). K(1) = +inf, E(1) = 1.
EllipticKE elliptic_ke(double m);

/// ln(x + sqrt(x^2 + 1)) without cancellation for small or negative x.
double asinh(double x);

}  // namespace fbtrack::specfun
