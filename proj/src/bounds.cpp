#include "fbtrack/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fbtrack/errors.hpp"
#include "fbtrack/quadrature.hpp"
#include "fbtrack/rng.hpp"
#include "fbtrack/specfun.hpp"

namespace fbtrack {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(double k, const char* fn, bool allow_zero) {
  if (!(k >= 0.0) || (!allow_zero && k == 0.0))
    throw DomainError(std::string(fn) + ": concentration k must be " +
                      (allow_zero ? "non-negative" : "positive"));
}

void check_gamma(double gamma, const char* fn) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw DomainError(std::string(fn) + ": gamma must be finite and non-negative");
}

// E[h(gamma)] for gamma ~ FOG(k), written as int_0^1 h(F^{-1}(u)) du with a
// break at u = F(1) where the conditional laws change character.
template <class H>
double fog_average(double k, double tol, H h, const char* what) {
  const double u1 = k / (1.0 + k);
  const double pts[] = {u1};
  quad::Options o;
  o.rel_tol = tol;
  o.abs_tol = 1e-15;
  return quad::integrate_checked([&](double u) { return h(fog_quantile(u, k)); }, 0.0, 1.0, pts,
                                 o, what);
}

// P(a < X < b), X ~ N(0, s^2), without cancellation in either tail.
double normal_interval(double a, double b, double s) {
  const double c = 1.0 / (s * std::numbers::sqrt2);
  if (a >= 0.0) return 0.5 * (std::erfc(a * c) - std::erfc(b * c));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * c) - std::erfc(-a * c));
  return 1.0 - 0.5 * (std::erfc(-a * c) + std::erfc(b * c));
}

double cell_center(int i, int levels, BinAlignment align) {
  const double d = 2.0 * kPi / levels;
  return -kPi + (align == BinAlignment::centered ? i * d : (i + 0.5) * d);
}

double entropy_of_masses(std::vector<double>& p) {
  double total = 0.0;
  for (double v : p) total += v;
  if (!(total > 0.0)) throw NumericError("quantized entropy: zero total mass");
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) {
      const double q = v / total;
      h -= q * std::log2(q);
    }
  return h;
}

}  // namespace

double fog_pdf(double x, double k) {
  check_k(k, "fog_pdf", false);
  if (x < 0.0) return 0.0;
  const double d = 1.0 + k * x * x;
  return 2.0 * k * x / (d * d);
}

double fog_cdf(double x, double k) {
  check_k(k, "fog_cdf", false);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double t = k * x * x;
  return t / (1.0 + t);
}

double fog_quantile(double u, double k) {
  check_k(k, "fog_quantile", false);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("fog_quantile: u outside [0, 1]");
  if (u == 1.0) return kInf;
  return std::sqrt(u / (k * (1.0 - u)));
}

FogSamples sample_fog(double k, std::size_t n, std::uint64_t seed) {
  check_k(k, "sample_fog", false);
  CounterRng ru(substream_key(seed, 1)), rp(substream_key(seed, 2));
  FogSamples s;
  s.gamma.resize(n);
  s.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.gamma[i] = fog_quantile(ru.uniform(), k);
    s.psi[i] = -kPi + 2.0 * kPi * rp.uniform();
  }
  return s;
}

FogSamples sample_fog_ratio(double k, std::size_t n, std::uint64_t seed) {
  check_k(k, "sample_fog_ratio", false);
  CounterRng r1(substream_key(seed, 11)), r5(substream_key(seed, 15));
  const double scale = 1.0 / std::sqrt(k);
  FogSamples s;
  s.gamma.resize(n);
  s.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a1 = r1.complex_normal();
    const auto a5 = r5.complex_normal();
    s.gamma[i] = scale * std::abs(a5) / std::abs(a1);
    double d = std::arg(a5) - std::arg(a1);
    d -= 2.0 * kPi * std::floor((d + kPi) / (2.0 * kPi));
    s.psi[i] = d;
  }
  return s;
}

double eps_given_fog(double gamma, double psi) {
  const double y = gamma * std::sin(psi);
  const double x = 1.0 + gamma * std::cos(psi);
  if (x == 0.0 && y == 0.0) return 0.0;
  const double e = std::atan2(y, x);
  return e >= kPi ? e - 2.0 * kPi : e;
}

double cond_var_upper(double gamma) {
  check_gamma(gamma, "cond_var_upper");
  if (gamma >= 1.0) return kPi * kPi / 3.0;
  // 1/sqrt(1-g^2) - 1 = g^2 / (sqrt(1-g^2) (1 + sqrt(1-g^2)))
  const double r = std::sqrt((1.0 - gamma) * (1.0 + gamma));
  return std::min(gamma * gamma / (r * (1.0 + r)), kPi * kPi / 3.0);
}

double cond_var_exact(double gamma, double rel_tol) {
  check_gamma(gamma, "cond_var_exact");
  if (gamma == 0.0) return 0.0;
  quad::Options o;
  o.rel_tol = rel_tol;
  const double v = quad::integrate_checked(
      [gamma](double psi) {
        const double e = std::atan2(gamma * std::sin(psi), 1.0 + gamma * std::cos(psi));
        return e * e;
      },
      0.0, kPi, o, "cond_var_exact");
  return v / kPi;
}

double cbar_eps_given_gamma(double gamma, double rel_tol) {
  check_gamma(gamma, "cbar_eps_given_gamma");
  if (gamma == 0.0) return 1.0;
  quad::Options o;
  o.rel_tol = rel_tol;
  o.abs_tol = 1e-14;
  const double v = quad::integrate_checked(
      [gamma](double psi) {
        const double x = 1.0 + gamma * std::cos(psi);
        const double nu = std::hypot(x, gamma * std::sin(psi));
        return nu > 0.0 ? x / nu : 0.0;
      },
      0.0, kPi, o, "cbar_eps_given_gamma");
  return v / kPi;
}

double fog_g(double gamma) {
  check_gamma(gamma, "fog_g");
  if (gamma == 1.0) throw DomainError("fog_g: singular at gamma = 1");
  const double dm = gamma - 1.0;
  const auto ke = specfun::elliptic_ke(-4.0 * gamma / (dm * dm));
  return ((1.0 - gamma) * ke.E + (1.0 + gamma) * ke.K) / kPi;
}

double cbar_eps_elliptic(double gamma) {
  const double g = fog_g(gamma);
  return gamma < 1.0 ? g : -g;
}

double cbar_lower(double gamma) {
  check_gamma(gamma, "cbar_lower");
  if (gamma < 1.0) return 1.0 - 0.5 * gamma * gamma;
  if (gamma == 1.0) return 0.5;
  const double s = std::sqrt((gamma - 1.0) * (gamma + 1.0));
  double tail;  // atan(s)/s^2 - 1/s
  if (s < 1e-2) {
    const double s2 = s * s;
    tail = s * (-1.0 / 3.0 + s2 * (1.0 / 5.0 + s2 * (-1.0 / 7.0 + s2 / 9.0)));
  } else {
    tail = std::atan(s) / (s * s) - 1.0 / s;
  }
  return 1.0 / (gamma + 1.0) + 2.0 / kPi * tail;
}

double sigma_u_sq(double k) {
  check_k(k, "sigma_u_sq", true);
  if (std::isinf(k)) return 0.0;
  const double a = std::sqrt(k / ((1.0 + k) * (1.0 + k) * (1.0 + k)));
  return a * specfun::asinh(std::sqrt(k)) + kPi * kPi / (3.0 + 3.0 * k);
}

double sigma_eps_sq_numeric(double k, double quad_tol) {
  check_k(k, "sigma_eps_sq_numeric", true);
  if (k == 0.0) return kPi * kPi / 3.0;
  if (std::isinf(k)) return 0.0;
  return fog_average(
      k, quad_tol,
      [](double g) { return std::isinf(g) ? kPi * kPi / 3.0 : cond_var_exact(g, 1e-10); },
      "sigma_eps_sq_numeric");
}

double c1_of_k(double k) {
  check_k(k, "c1_of_k", true);
  if (std::isinf(k)) return 1.0;
  if (k < 1e-3) {
    // sum_{n>=1} (-1)^{n+1} k^n (n+2) / (2(n+1))
    double s = 0.0, p = 1.0;
    for (int n = 1; n <= 8; ++n) {
      p *= k;
      s += (n % 2 ? 1.0 : -1.0) * p * (n + 2) / (2.0 * (n + 1));
    }
    return s;
  }
  return 1.0 - 0.5 / (1.0 + k) - std::log1p(k) / (2.0 * k);
}

double c2_of_k(double k) {
  check_k(k, "c2_of_k", true);
  if (k == 0.0 || std::isinf(k)) return 0.0;
  const double sk = std::sqrt(k), sk1 = std::sqrt(1.0 + k);
  const double w = k / ((1.0 + k) * (1.0 + k));
  const double t1 = sk * (1.0 - k) * std::atan(1.0 / sk) / ((1.0 + k) * (1.0 + k));
  const double t2 = w * std::log(4.0 * k / (1.0 + k));
  const double d = k / (sk * sk1 + k);          // sqrt(k(1+k)) - k
  const double e = sk1 / (sk1 + sk);            // k + 1 - sqrt(k(1+k))
  const double t3 = -w * (2.0 * std::log(d) + e);
  const double t4 = -sk / ((1.0 + k) * sk1);
  return t1 + t2 + t3 + t4;
}

double rbar_L(double k) { return c1_of_k(k) + c2_of_k(k); }

double rbar_eps_numeric(double k, double quad_tol) {
  check_k(k, "rbar_eps_numeric", true);
  if (k == 0.0) return 0.0;
  if (std::isinf(k)) return 1.0;
  return fog_average(
      k, quad_tol,
      [](double g) { return std::isinf(g) ? 0.0 : cbar_eps_given_gamma(g, 1e-10); },
      "rbar_eps_numeric");
}

double gaussian_entropy_bits(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DomainError("gaussian_entropy_bits: variance must be positive and finite");
  return 0.5 * std::log2(2.0 * kPi * std::numbers::e * variance);
}

double vonmises_entropy_from_kappa(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw DomainError("vonmises_entropy_from_kappa: kappa must be finite and non-negative");
  const double a = specfun::mrl_of_kappa(kappa);
  return kappa * (1.0 - a) * std::numbers::log2e +
         std::log2(2.0 * kPi * specfun::bessel_i_scaled(0, kappa));
}

double vonmises_entropy_bits(double rbar) {
  if (!(rbar >= 0.0 && rbar < 1.0))
    throw DomainError("vonmises_entropy_bits: mean resultant length must lie in [0, 1)");
  const double kappa = specfun::kappa_of_mrl(rbar);
  return kappa * (1.0 - rbar) * std::numbers::log2e +
         std::log2(2.0 * kPi * specfun::bessel_i_scaled(0, kappa));
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::gaussian_numeric: return "gaussian_numeric";
    case BoundKind::gaussian_closed: return "gaussian_closed";
    case BoundKind::vonmises_numeric: return "vonmises_numeric";
    case BoundKind::vonmises_closed: return "vonmises_closed";
  }
  return "?";
}

BoundKind parse_bound_kind(std::string_view name) {
  for (auto k : {BoundKind::gaussian_numeric, BoundKind::gaussian_closed,
                 BoundKind::vonmises_numeric, BoundKind::vonmises_closed})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown bound kind '" + std::string(name) + "'");
}

EntropyBound entropy_bound(BoundKind kind, double k, double quad_tol) {
  check_k(k, "entropy_bound", true);
  if (std::isinf(k)) throw DomainError("entropy_bound: k must be finite");
  EntropyBound b{kind, 0.0, 0.0, k};
  switch (kind) {
    case BoundKind::gaussian_numeric:
      b.intermediate = sigma_eps_sq_numeric(k, quad_tol);
      b.value_bits = gaussian_entropy_bits(b.intermediate);
      break;
    case BoundKind::gaussian_closed:
      b.intermediate = sigma_u_sq(k);
      b.value_bits = gaussian_entropy_bits(b.intermediate);
      break;
    case BoundKind::vonmises_numeric:
      b.intermediate = rbar_eps_numeric(k, quad_tol);
      b.value_bits = vonmises_entropy_bits(b.intermediate);
      break;
    case BoundKind::vonmises_closed:
      b.intermediate = rbar_L(k);
      b.value_bits = vonmises_entropy_bits(b.intermediate);
      break;
  }
  return b;
}

std::array<EntropyBound, 4> bound_suite(double k, double quad_tol) {
  return {entropy_bound(BoundKind::gaussian_numeric, k, quad_tol),
          entropy_bound(BoundKind::gaussian_closed, k, quad_tol),
          entropy_bound(BoundKind::vonmises_numeric, k, quad_tol),
          entropy_bound(BoundKind::vonmises_closed, k, quad_tol)};
}

AsymptoticGaps asymptotic_gaps() {
  const double uniform = std::log2(2.0 * kPi);
  return {gaussian_entropy_bits(kPi * kPi / 3.0) - uniform,
          vonmises_entropy_bits(rbar_L(0.0)) - uniform};
}

double quantized_vonmises_entropy_bits(double rbar, int levels, BinAlignment align) {
  if (levels < 2) throw DomainError("quantized_vonmises_entropy_bits: need at least 2 levels");
  const double kappa = specfun::kappa_of_mrl(rbar);
  const double d = 2.0 * kPi / levels;
  quad::Options o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-300;
  std::vector<double> p(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    const double c = cell_center(i, levels, align);
    p[i] = quad::integrate_checked(
        [kappa](double x) {
          const double s = std::sin(0.5 * x);
          return std::exp(-2.0 * kappa * s * s);  // cos x - 1 without cancellation
        },
        c - 0.5 * d,
        c + 0.5 * d, o, "quantized_vonmises_entropy_bits");
  }
  return entropy_of_masses(p);
}

double quantized_gaussian_entropy_bits(double variance, int levels, BinAlignment align) {
  if (levels < 2) throw DomainError("quantized_gaussian_entropy_bits: need at least 2 levels");
  if (!(variance > 0.0)) throw DomainError("quantized_gaussian_entropy_bits: variance must be positive");
  const double s = std::sqrt(variance);
  const double d = 2.0 * kPi / levels;
  const int wraps = static_cast<int>(std::ceil(8.0 * s / (2.0 * kPi))) + 1;
  std::vector<double> p(static_cast<std::size_t>(levels), 0.0);
  for (int i = 0; i < levels; ++i) {
    const double c = cell_center(i, levels, align);
    for (int w = -wraps; w <= wraps; ++w) {
      const double shift = 2.0 * kPi * w;
      p[i] += normal_interval(c - 0.5 * d + shift, c + 0.5 * d + shift, s);
    }
  }
  return entropy_of_masses(p);
}

double discrete_bound_bits(double continuous_bits, int levels) {
  if (levels < 2) throw DomainError("discrete_bound_bits: need at least 2 levels");
  return std::max(0.0, continuous_bits + std::log2(levels / (2.0 * kPi)));
}

double quantized_bound_bits(const EntropyBound& bound, int levels, BinAlignment align) {
  switch (bound.kind) {
    case BoundKind::gaussian_numeric:
    case BoundKind::gaussian_closed:
      return quantized_gaussian_entropy_bits(bound.intermediate, levels, align);
    default:
      return quantized_vonmises_entropy_bits(bound.intermediate, levels, align);
  }
}

}  // namespace fbtrack
