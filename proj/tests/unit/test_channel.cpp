#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fbtrack/channel.hpp"
#include "fbtrack/errors.hpp"

using namespace fbtrack;

TEST_CASE("correlation parameters from the normalised Doppler frequency") {
  const auto p = params_from_fn(0.1);
  CHECK(p.rho == doctest::Approx(std::cyl_bessel_j(0.0, 0.2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(p.rho_c == doctest::Approx(std::sqrt(1 - p.rho * p.rho)));
  CHECK(p.k == doctest::Approx(std::pow(p.rho, 4) / (1 - std::pow(p.rho, 4))));
  const auto d = params_from_doppler(100.0, 1e-3);
  CHECK(d.f_n == doctest::Approx(0.1));
  CHECK(d.f_d.value() == 100.0);
  CHECK(std::isinf(params_from_fn(0.0).k));
  CHECK(params_from_fn(0.0).rho_c == 0.0);
  CHECK_THROWS_AS(params_from_fn(-0.1), DomainError);
  // Beyond the first zero of J0 rho turns negative and is used as-is.
  CHECK(params_from_fn(0.5).rho < 0.0);
}

TEST_CASE("principal-branch inverse of rho") {
  for (double f : {1e-4, 0.01, 0.2, 0.38}) {
    const auto p = params_from_rho(params_from_fn(f).rho);
    CHECK(p.f_n == doctest::Approx(f).epsilon(1e-9));
  }
  CHECK(params_from_rho(1.0).f_n == 0.0);
  CHECK(std::isnan(params_from_rho(-0.2).f_n));
  CHECK_THROWS_AS(params_from_rho(1.5), DomainError);
}

TEST_CASE("fog concentration is stable near |rho| = 1") {
  const double r = 1.0 - 1e-12;
  const long double rl = r;
  const long double ref = rl * rl * rl * rl / (1.0L - rl * rl * rl * rl);
  CHECK(fog_concentration(r) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-4));
  CHECK(std::isinf(fog_concentration(-1.0)));
}

TEST_CASE("Gauss-Markov sequence keeps unit entry variance and lag-one correlation rho") {
  const auto p = params_from_fn(0.05);
  double var = 0.0, cross = 0.0;
  int n = 0;
  for (int c = 0; c < 400; ++c) {
    ChannelSequence seq(2, 2, p, 99, c);
    for (int t = 0; t < 50; ++t) {
      const Eigen::MatrixXcd prev = seq.state().matrix;
      seq.step();
      const auto& h = seq.state().matrix;
      for (int i = 0; i < 4; ++i) {
        var += std::norm(h(i));
        cross += (h(i) * std::conj(prev(i))).real();
        ++n;
      }
    }
  }
  CHECK(var / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(cross / n == doctest::Approx(p.rho).epsilon(0.02));
}

TEST_CASE("sequences are reproducible and substreams differ") {
  const auto p = params_from_fn(0.1);
  ChannelSequence a(2, 3, p, 5, 0), b(2, 3, p, 5, 0), c(2, 3, p, 5, 1);
  for (int t = 0; t < 10; ++t) {
    a.step();
    b.step();
    c.step();
  }
  CHECK(a.state().matrix == b.state().matrix);
  CHECK(a.state().matrix != c.state().matrix);
  CHECK(a.state().slot_index == 10);
}

TEST_CASE("static channel stays frozen") {
  ChannelSequence s(2, 2, params_from_fn(0.0), 3);
  const Eigen::MatrixXcd h0 = s.state().matrix;
  for (int t = 0; t < 5; ++t) s.step();
  CHECK(s.state().matrix == h0);
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(init_channel(0, 2, 1), DomainError);
  CHECK_THROWS_AS(init_channel(2, 1, 1), DomainError);
}
