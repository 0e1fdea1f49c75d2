#include "fbtrack/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fbtrack/errors.hpp"

namespace fbtrack::specfun {
namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 100; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

// Miller's algorithm: recur J_n downward from an arbitrary seed and normalise
// with 1 = J0 + 2 sum_k J_2k.
double j0_miller(double x) {
  const int start = 2 * (static_cast<int>(x + 40.0) / 2 + 1);
  double next = 0.0;        // J_{n+1}
  double current = 1e-300;  // J_n
  double norm = 0.0;
  for (int n = start; n >= 1; --n) {
    const double prev = (2.0 * n / x) * current - next;  // J_{n-1}
    next = current;
    current = prev;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += current;
  return current / norm;
}

double j0_hankel(double x) {
  // P and Q series with a_k = prod (2j-1)^2 / (k! 8^k) for order zero.
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (term > last) break;
    last = term;
    const int phase = k % 4;  // odd k feed Q, even k feed P, alternating signs
    if (phase == 1) q += term;
    if (phase == 2) p -= term;
    if (phase == 3) q -= term;
    if (phase == 0) p += term;
    if (term < 1e-18) break;
  }
  const double chi = x - 0.25 * kPi;
  // J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi); the accumulated q is -Q.
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) + q * std::sin(chi));
}

double i_series(int nu, double x) {
  const double h = 0.5 * x;
  double term = nu == 0 ? 1.0 : h;
  double sum = term;
  const double q = h * h;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * (m + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// sqrt(2 pi x) * exp(-x) * I_nu(x) from the asymptotic expansion (x large).
double i_asymptotic_core(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    sum += term;
    if (last < 1e-18) break;
  }
  return sum;
}

constexpr double kISeriesLimit = 30.0;
constexpr double kRatioSeriesLimit = 20.0;

void check_order(int order) {
  if (order != 0 && order != 1) throw DomainError("bessel_i: order must be 0 or 1");
}

void check_nonnegative(double x, const char* fn) {
  require_finite(x, fn);
  if (x < 0.0) throw DomainError(std::string(fn) + ": argument must be >= 0");
}

}  // namespace

double bessel_j0(double x) {
  require_finite(x, "bessel_j0");
  const double ax = std::abs(x);
  if (ax <= 8.0) return j0_series(ax);
  if (ax <= 25.0) return j0_miller(ax);
  return j0_hankel(ax);
}

double bessel_i_scaled(int order, double x) {
  check_order(order);
  check_nonnegative(x, "bessel_i_scaled");
  if (x <= kISeriesLimit) return i_series(order, x) * std::exp(-x);
  return i_asymptotic_core(order, x) / std::sqrt(2.0 * kPi * x);
}

double bessel_i(int order, double x) {
  check_order(order);
  check_nonnegative(x, "bessel_i");
  if (x <= kISeriesLimit) return i_series(order, x);
  return bessel_i_scaled(order, x) * std::exp(x);
}

double mrl_of_kappa(double kappa) {
  check_nonnegative(kappa, "mrl_of_kappa");
  if (kappa == 0.0) return 0.0;
  double value;
  if (kappa <= kRatioSeriesLimit) {
    value = i_series(1, kappa) / i_series(0, kappa);
  } else {
    value = i_asymptotic_core(1, kappa) / i_asymptotic_core(0, kappa);
  }
  return std::min(value, std::nextafter(1.0, 0.0));
}

double mrl_derivative(double kappa) {
  check_nonnegative(kappa, "mrl_derivative");
  if (kappa == 0.0) return 0.5;
  const double a = mrl_of_kappa(kappa);
  if (kappa > 1e3) {
    // 1 - A/k - A^2 cancels; use the expansion 1/(2k^2) + 1/(4k^3) + 5/(16k^4).
    const double r = 1.0 / kappa;
    return r * r * (0.5 + r * (0.25 + r * (5.0 / 16.0)));
  }
  return 1.0 - a / kappa - a * a;
}

double kappa_of_mrl(double rbar) {
  require_finite(rbar, "kappa_of_mrl");
  if (rbar < 0.0 || rbar >= 1.0) throw DomainError("kappa_of_mrl: rbar must lie in [0, 1)");
  if (rbar == 0.0) return 0.0;

  // Standard piecewise approximations for the starting point.
  double kappa;
  if (rbar < 0.53) {
    kappa = 2.0 * rbar + rbar * rbar * rbar + 5.0 * std::pow(rbar, 5) / 6.0;
  } else if (rbar < 0.85) {
    kappa = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  } else {
    kappa = 1.0 / (rbar * rbar * rbar - 4.0 * rbar * rbar + 3.0 * rbar);
  }

  double lo = 0.0;
  double hi = std::max(2.0 * kappa, 1.0);
  while (mrl_of_kappa(hi) < rbar) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("kappa_of_mrl: failed to bracket root");
  }
  if (kappa <= lo || kappa >= hi) kappa = 0.5 * (lo + hi);

  for (int it = 0; it < 300; ++it) {
    const double f = mrl_of_kappa(kappa) - rbar;
    if (f == 0.0) break;
    if (f > 0.0) hi = kappa; else lo = kappa;
    double candidate = kappa - f / mrl_derivative(kappa);
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    const double step = std::abs(candidate - kappa);
    kappa = candidate;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, kappa) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      break;
    }
  }
  if (std::abs(mrl_of_kappa(kappa) - rbar) >= 1e-10) {
    throw NumericError("kappa_of_mrl: residual above 1e-10 for rbar = " + std::to_string(rbar));
  }
  return kappa;
}

EllipticKE elliptic_ke(double m) {
  require_finite(m, "elliptic_ke");
  if (m > 1.0) throw DomainError("elliptic_ke: parameter m must be <= 1");
  if (m == 1.0) return {std::numeric_limits<double>::infinity(), 1.0};
  if (m < 0.0) {
    // K(m) = K(m/(m-1)) / sqrt(1-m), E(m) = sqrt(1-m) E(m/(m-1)).
    const double s = std::sqrt(1.0 - m);
    const EllipticKE t = elliptic_ke(m / (m - 1.0));
    return {t.K / s, t.E * s};
  }
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double c = std::sqrt(m);
  double power = 0.5;  // 2^{n-1}
  double deficit = power * c * c;
  for (int n = 0; n < 60 && std::abs(c) > 1e-17; ++n) {
    const double an = 0.5 * (a + b);
    c = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    power *= 2.0;
    deficit += power * c * c;
  }
  const double K = 0.5 * kPi / a;
  return {K, K * (1.0 - deficit)};
}

double asinh(double x) {
  require_finite(x, "asinh");
  const double ax = std::abs(x);
  double r;
  if (ax > 1e8) {
    r = std::log(ax) + std::numbers::ln2;
  } else {
    r = std::log1p(ax + ax * ax / (1.0 + std::sqrt(1.0 + ax * ax)));
  }
  return std::signbit(x) ? -r : r;
}

}  // namespace fbtrack::specfun
