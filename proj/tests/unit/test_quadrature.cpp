#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbtrack/errors.hpp"
#include "fbtrack/quadrature.hpp"

using namespace fbtrack;

TEST_CASE("smooth integrals reach the requested relative tolerance") {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  const auto e = quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(e.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity and interior kinks") {
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  const std::vector<double> pts{0.3};
  const auto k = quad::integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, pts);
  CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
  CHECK(k.intervals <= 4);
}

TEST_CASE("reversed and empty intervals") {
  const auto r = quad::integrate([](double x) { return x * x; }, 1.0, 0.0);
  CHECK(r.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("non-convergence is reported and raised by the checked variant") {
  quad::Options o;
  o.max_intervals = 20;
  const auto r = quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, o);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(quad::integrate_checked([](double x) { return 1.0 / x; }, 0.0, 1.0, o, "test"),
                  NumericError);
}
