#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbtrack/bounds.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/stats.hpp"

using namespace fbtrack;
constexpr double kPi = std::numbers::pi;

namespace {
// Composite midpoint rule: a deliberately simple oracle independent of the adaptive scheme.
template <class F>
double midpoint(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

double oracle_cond_var(double g) {
  return midpoint([g](double p) {
    const double e = std::atan2(g * std::sin(p), 1 + g * std::cos(p));
    return e * e;
  }, 0.0, kPi, 200000) / kPi;
}

double oracle_cbar(double g) {
  return midpoint([g](double p) {
    return (1 + g * std::cos(p)) / std::sqrt(1 + g * g + 2 * g * std::cos(p));
  }, 0.0, kPi, 200000) / kPi;
}

// Original (unsimplified) c2 expression evaluated in long double.
long double oracle_c2(long double k) {
  const long double sk = std::sqrt(k), w = k / ((1 + k) * (1 + k));
  return sk * (1 - k) * (kPi - 2 * std::atan(sk)) / (2 * (1 + k) * (1 + k)) +
         w * std::log(4 * k / (1 + k)) -
         w * (2 * std::log(std::sqrt(k * (1 + k)) - k) + k + 1 - std::sqrt(k * (1 + k))) -
         std::sqrt(k / ((1 + k) * (1 + k) * (1 + k)));
}
}  // namespace

TEST_CASE("FOG pdf integrates to one and is the derivative of the CDF") {
  for (double k : {0.01, 1.0, 250.0}) {
    // x = tan(t) / sqrt(k) maps (0, pi/2) onto (0, inf).
    const double mass = midpoint([k](double t) {
      const double x = std::tan(t) / std::sqrt(k);
      return fog_pdf(x, k) / (std::sqrt(k) * std::cos(t) * std::cos(t));
    }, 0.0, kPi / 2, 100000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    for (double x : {0.1, 1.0, 4.0}) {
      const double y = x / std::sqrt(k), h = 1e-6 * y;
      CHECK((fog_cdf(y + h, k) - fog_cdf(y - h, k)) / (2 * h) ==
            doctest::Approx(fog_pdf(y, k)).epsilon(1e-6));
      CHECK(fog_cdf(fog_quantile(fog_cdf(y, k), k), k) == doctest::Approx(fog_cdf(y, k)));
    }
    CHECK(fog_cdf(1.0 / std::sqrt(k), k) == doctest::Approx(0.5));
  }
  CHECK(fog_pdf(-1.0, 1.0) == 0.0);
  CHECK(std::isinf(fog_quantile(1.0, 2.0)));
  CHECK_THROWS_AS(fog_pdf(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(fog_quantile(1.5, 1.0), DomainError);
}

TEST_CASE("both FOG samplers agree with the closed-form law") {
  const double k = 2.0;
  const auto a = sample_fog(k, 200000, 1);
  const auto b = sample_fog_ratio(k, 200000, 2);
  const auto cdf = [k](double x) { return fog_cdf(x, k); };
  CHECK(stats::ks_statistic(a.gamma, cdf) < 1.63 / std::sqrt(200000.0));
  CHECK(stats::ks_statistic(b.gamma, cdf) < 1.63 / std::sqrt(200000.0));
  // Phases are uniform: mean cosine near zero.
  double c = 0;
  for (double p : b.psi) c += std::cos(p);
  CHECK(std::abs(c / b.psi.size()) < 4.0 / std::sqrt(2.0 * 200000));
}

TEST_CASE("tracking value of the FOG") {
  CHECK(eps_given_fog(0.0, 1.0) == 0.0);
  CHECK(eps_given_fog(1.0, kPi / 2) == doctest::Approx(kPi / 4));
  for (double p : {-3.0, -1.0, 0.4, 3.1}) CHECK(eps_given_fog(1.0, p) == doctest::Approx(p / 2));
  CHECK(eps_given_fog(2.0, kPi) == doctest::Approx(-kPi));
}

TEST_CASE("conditional variance: exact value, bound and dominance") {
  for (double g : {0.05, 0.3, 0.7, 0.95, 1.0, 1.3, 4.0, 50.0}) {
    const double exact = cond_var_exact(g);
    CHECK(exact == doctest::Approx(oracle_cond_var(g)).epsilon(1e-7));
    CHECK(exact <= cond_var_upper(g));
  }
  CHECK(cond_var_upper(0.6) == doctest::Approx(1.0 / 0.8 - 1.0));
  CHECK(cond_var_upper(1.0) == doctest::Approx(kPi * kPi / 3));
  CHECK(cond_var_upper(0.999999999) <= kPi * kPi / 3);
  CHECK(cond_var_exact(0.0) == 0.0);
  // gamma -> infinity: eps approaches uniform psi.
  CHECK(cond_var_exact(1e6) == doctest::Approx(kPi * kPi / 3).epsilon(1e-5));
  CHECK_THROWS_AS(cond_var_upper(-1.0), DomainError);
}

TEST_CASE("conditional mean cosine: quadrature, elliptic form and lower bound") {
  for (double g : {0.01, 0.2, 0.5, 0.9, 0.999, 1.001, 1.5, 3.0, 10.0}) {
    const double q = cbar_eps_given_gamma(g);
    CHECK(q == doctest::Approx(oracle_cbar(g)).epsilon(1e-7));
    CHECK(cbar_eps_elliptic(g) == doctest::Approx(q).epsilon(1e-9));
    CHECK(std::abs(cbar_eps_elliptic(g)) == doctest::Approx(std::abs(fog_g(g))));
    CHECK(cbar_lower(g) <= q);
    if (g < 1) CHECK(q >= 0.0);
  }
  CHECK(cbar_eps_given_gamma(1.0) == doctest::Approx(2.0 / kPi));
  CHECK(cbar_eps_given_gamma(0.0) == 1.0);
  CHECK_THROWS_AS(fog_g(1.0), DomainError);
}

TEST_CASE("lower bound on the mean cosine is continuous at gamma = 1 and across the series switch") {
  CHECK(cbar_lower(1.0) == 0.5);
  CHECK(cbar_lower(1.0 - 1e-9) == doctest::Approx(0.5));
  CHECK(cbar_lower(1.0 + 1e-9) == doctest::Approx(0.5));
  // s = sqrt(g^2 - 1) = 1e-2 is the switch point.
  const double g0 = std::sqrt(1.0 + 1e-4);
  CHECK(cbar_lower(g0 * (1 - 1e-12)) == doctest::Approx(cbar_lower(g0 * (1 + 1e-12))).epsilon(1e-10));
  // Long-double reference away from the switch.
  const long double g = 1.2L, s = std::sqrt(g * g - 1);
  const long double ref = 1 / (g + 1) + 2 * std::atan(s) / (kPi * s * s) - 2 / (kPi * s);
  CHECK(cbar_lower(1.2) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
}

TEST_CASE("closed-form variance bound") {
  CHECK(sigma_u_sq(0.0) == doctest::Approx(kPi * kPi / 3));
  const double k = 3.0;
  CHECK(sigma_u_sq(k) == doctest::Approx(std::sqrt(k / 64.0) * std::asinh(std::sqrt(k)) + kPi * kPi / 12.0));
  CHECK(sigma_u_sq(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("numeric averages agree with Monte-Carlo over the FOG law") {
  for (double k : {0.3, 5.0}) {
    const auto s = sample_fog(k, 400000, 17);
    std::vector<double> sq, cs;
    for (std::size_t i = 0; i < s.gamma.size(); ++i) {
      const double e = eps_given_fog(s.gamma[i], s.psi[i]);
      sq.push_back(e * e);
      cs.push_back(std::cos(e));
    }
    const auto v = stats::mean_se(sq), c = stats::mean_se(cs);
    CHECK(std::abs(sigma_eps_sq_numeric(k) - v.mean) < 4 * v.std_error);
    CHECK(std::abs(rbar_eps_numeric(k) - c.mean) < 4 * c.std_error);
  }
  CHECK(sigma_eps_sq_numeric(0.0) == doctest::Approx(kPi * kPi / 3));
  CHECK(rbar_eps_numeric(0.0) == 0.0);
}

TEST_CASE("c1, c2 and the MRL lower bound") {
  for (double k : {1e-3, 0.05, 0.7, 1.0, 3.0, 40.0, 900.0}) {
    const long double kl = k;
    const long double c1 = 1 - 1 / (2 * (1 + kl)) - std::log1p(kl) / (2 * kl);
    CHECK(c1_of_k(k) == doctest::Approx(static_cast<double>(c1)).epsilon(1e-12));
    CHECK(c2_of_k(k) == doctest::Approx(static_cast<double>(oracle_c2(kl))).epsilon(1e-8));
    CHECK(c1_of_k(k) >= 0.0);
    CHECK(c2_of_k(k) >= 0.0);
    CHECK(rbar_L(k) <= rbar_eps_numeric(k));
    CHECK(sigma_eps_sq_numeric(k) <= sigma_u_sq(k));
  }
  // Series branch of c1 joins the direct formula.
  CHECK(c1_of_k(0.999e-3) == doctest::Approx(c1_of_k(1.001e-3)).epsilon(5e-3));
  CHECK(c1_of_k(1e-9) == doctest::Approx(0.75e-9).epsilon(1e-6));
  CHECK(rbar_L(0.0) == 0.0);
  CHECK(rbar_L(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(rbar_L(1e8) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("maximum-entropy densities") {
  CHECK(gaussian_entropy_bits(1.0) == doctest::Approx(0.5 * std::log2(2 * kPi * std::numbers::e)));
  CHECK_THROWS_AS(gaussian_entropy_bits(0.0), DomainError);
  CHECK(vonmises_entropy_bits(0.0) == doctest::Approx(std::log2(2 * kPi)));
  // Differential entropy by direct integration of -f log2 f.
  for (double kappa : {0.5, 4.0, 60.0}) {
    const double i0 = std::cyl_bessel_i(0.0, kappa);
    const double h = midpoint([&](double x) {
      const double f = std::exp(kappa * std::cos(x)) / (2 * kPi * i0);
      return -f * std::log2(f);
    }, -kPi, kPi, 200000);
    CHECK(vonmises_entropy_from_kappa(kappa) == doctest::Approx(h).epsilon(1e-9));
    const double r = std::cyl_bessel_i(1.0, kappa) / i0;
    CHECK(vonmises_entropy_bits(r) == doctest::Approx(h).epsilon(1e-8));
  }
  CHECK_THROWS_AS(vonmises_entropy_bits(1.0), DomainError);
}

TEST_CASE("bound suite ordering and asymptotics") {
  for (double k : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
    const auto s = bound_suite(k);
    CHECK(s[0].kind == BoundKind::gaussian_numeric);
    CHECK(s[3].kind == BoundKind::vonmises_closed);
    CHECK(s[0].value_bits <= s[1].value_bits + 1e-9);
    CHECK(s[2].value_bits <= s[3].value_bits + 1e-9);
    // von Mises maximises entropy for a given MRL, so at equal information it is tighter.
    CHECK(s[2].value_bits <= s[0].value_bits + 1e-9);
  }
  const auto g = asymptotic_gaps();
  CHECK(g.gaussian_gap_bits == doctest::Approx(0.5 * std::log2(std::numbers::e * kPi / 6)));
  CHECK(g.gaussian_gap_bits == doctest::Approx(0.2546).epsilon(1e-3));
  CHECK(g.vonmises_gap_bits == doctest::Approx(0.0));
  CHECK(parse_bound_kind("gaussian_closed") == BoundKind::gaussian_closed);
  CHECK_THROWS_AS(parse_bound_kind("nope"), ConfigError);
  CHECK_THROWS_AS(entropy_bound(BoundKind::vonmises_closed, std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("discrete versions of the bounds") {
  CHECK(discrete_bound_bits(std::log2(2 * kPi), 128) == doctest::Approx(7.0));
  CHECK(discrete_bound_bits(-10.0, 128) == 0.0);
  // Quantised densities: uniform limit gives log2 L; a wide density follows h + log2(L / 2pi).
  CHECK(quantized_vonmises_entropy_bits(0.0, 64, BinAlignment::centered) == doctest::Approx(6.0));
  CHECK(quantized_gaussian_entropy_bits(1e4, 64, BinAlignment::edge) == doctest::Approx(6.0).epsilon(1e-6));
  const double var = 0.25;
  CHECK(quantized_gaussian_entropy_bits(var, 1024, BinAlignment::centered) ==
        doctest::Approx(gaussian_entropy_bits(var) + std::log2(1024 / (2 * kPi))).epsilon(1e-4));
  // Midpoint oracle for the von Mises cell masses.
  const double kappa = 8.0, r = std::cyl_bessel_i(1.0, kappa) / std::cyl_bessel_i(0.0, kappa);
  double h = 0;
  for (int i = 0; i < 16; ++i) {
    const double c = -kPi + i * 2 * kPi / 16;
    const double p = midpoint([&](double x) { return std::exp(kappa * std::cos(x)); }, c - kPi / 16, c + kPi / 16, 4000) /
                     (2 * kPi * std::cyl_bessel_i(0.0, kappa));
    h -= p * std::log2(p);
  }
  CHECK(quantized_vonmises_entropy_bits(r, 16, BinAlignment::centered) == doctest::Approx(h).epsilon(1e-7));
  // Very concentrated densities put (almost) everything in one cell.
  CHECK(quantized_vonmises_entropy_bits(1.0 - 1e-9, 128, BinAlignment::centered) < 1e-6);
}
