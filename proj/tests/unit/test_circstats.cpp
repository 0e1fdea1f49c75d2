#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbtrack/circstats.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/rng.hpp"

using namespace fbtrack;
constexpr double kPi = std::numbers::pi;

TEST_CASE("quantiser cells for both alignments") {
  CHECK(quantize_angle(-kPi, 4, BinAlignment::edge) == 0);
  CHECK(quantize_angle(-1e-12, 4, BinAlignment::edge) == 1);
  CHECK(quantize_angle(0.0, 4, BinAlignment::edge) == 2);
  CHECK(quantize_angle(kPi - 1e-12, 4, BinAlignment::edge) == 3);
  // Centered: 0 is the centre of cell L/2; the seam cell is 0.
  CHECK(quantize_angle(0.0, 4, BinAlignment::centered) == 2);
  CHECK(quantize_angle(0.7, 4, BinAlignment::centered) == 2);
  CHECK(quantize_angle(0.8, 4, BinAlignment::centered) == 3);
  CHECK(quantize_angle(kPi - 0.1, 4, BinAlignment::centered) == 0);
  CHECK(quantize_angle(-kPi + 0.1, 4, BinAlignment::centered) == 0);
  CHECK(quantize_angle(3 * kPi + 0.01, 4, BinAlignment::edge) == quantize_angle(kPi + 0.01, 4));
  CHECK_THROWS_AS(quantize_angle(0.0, 1), DomainError);
}

TEST_CASE("plug-in entropy of known histograms") {
  std::vector<std::uint32_t> bins;
  for (int i = 0; i < 4000; ++i) bins.push_back(static_cast<std::uint32_t>(i % 4));
  const auto e = discrete_entropy(bins, 8);
  CHECK(e.discrete_bits == doctest::Approx(2.0));
  CHECK(e.occupied_cells == 4);
  CHECK(e.continuous_bits == doctest::Approx(2.0 + std::log2(2 * kPi / 8)));
  CHECK(e.bias_bound == doctest::Approx(3.0 / (2 * 4000 * std::log(2.0))));
  // p = (1/2, 1/4, 1/4): 1.5 bits.
  std::vector<std::uint32_t> b2;
  for (int i = 0; i < 400; ++i) b2.push_back(i % 4 == 3 ? 2 : static_cast<std::uint32_t>(i % 4 / 2 == 0 ? 0 : 1));
  CHECK(discrete_entropy(b2, 4).discrete_bits == doctest::Approx(1.5));
  CHECK_THROWS_AS(discrete_entropy(std::vector<std::uint32_t>{5}, 4), DomainError);
}

TEST_CASE("uniform angles approach log2 L and log2 2pi") {
  CounterRng rng(42);
  std::vector<double> x(400000);
  for (auto& v : x) v = -kPi + 2 * kPi * rng.uniform();
  const auto e = joint_discrete_entropy(x, 1, 64);
  CHECK(e.discrete_bits == doctest::Approx(6.0).epsilon(1e-3));
  CHECK(e.continuous_bits == doctest::Approx(std::log2(2 * kPi)).epsilon(1e-3));
  CHECK(e.std_error > 0.0);
  CHECK(e.std_error < 1e-3);
}

TEST_CASE("joint entropy of independent coordinates adds") {
  CounterRng rng(7);
  std::vector<double> flat, a, b;
  for (int i = 0; i < 200000; ++i) {
    const double u = -kPi + 2 * kPi * rng.uniform();
    const double v = 0.3 * rng.normal();
    flat.push_back(u);
    flat.push_back(v);
    a.push_back(u);
    b.push_back(v);
  }
  const auto j = joint_discrete_entropy(flat, 2, 32);
  const auto ea = joint_discrete_entropy(a, 1, 32), eb = joint_discrete_entropy(b, 1, 32);
  CHECK(j.discrete_bits == doctest::Approx(ea.discrete_bits + eb.discrete_bits).epsilon(2e-3));
  CHECK(j.dimension == 2);
  CHECK_THROWS_AS(joint_discrete_entropy(flat, 2, 8192), CapacityError);
  CHECK_THROWS_AS(joint_discrete_entropy(std::vector<double>{1.0, 2.0, 3.0}, 2, 8), DomainError);
}

TEST_CASE("circular summary") {
  const std::vector<double> x{0.2, 0.2, 0.2};
  const auto s = circular_summary(x);
  CHECK(s.r_bar == doctest::Approx(1.0));
  CHECK(s.mu_bar == doctest::Approx(0.2));
  const std::vector<double> opp{0.0, kPi / 2, kPi, -kPi / 2};
  CHECK(circular_summary(opp).r_bar == doctest::Approx(0.0).epsilon(1e-12).scale(1));
  CHECK_THROWS_AS(circular_summary(std::vector<double>{}), DomainError);
}

TEST_CASE("histogram shards merge to the pooled histogram") {
  CounterRng rng(3);
  AngleHistogram a(16, BinAlignment::centered), b(16, BinAlignment::centered), all(16, BinAlignment::centered);
  std::vector<double> x;
  for (int i = 0; i < 5000; ++i) {
    const double v = rng.normal();
    x.push_back(v);
    (i % 2 ? a : b).add(v);
    all.add(v);
  }
  a.merge(b);
  CHECK(a.total() == 5000);
  for (int i = 0; i < 16; ++i) CHECK(a.counts()[i] == all.counts()[i]);
  CHECK(a.entropy().discrete_bits ==
        doctest::Approx(joint_discrete_entropy(x, 1, 16, BinAlignment::centered).discrete_bits));
  AngleHistogram other(8);
  CHECK_THROWS_AS(a.merge(other), DomainError);
}

TEST_CASE("mutual information of steering") {
  CHECK(mutual_information_steering(2.65, 1.0) == doctest::Approx(1.65));
}
