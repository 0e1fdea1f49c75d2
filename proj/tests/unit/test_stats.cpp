#include <cmath>
#include <vector>

#include "doctest.h"
#include "fbtrack/errors.hpp"
#include "fbtrack/stats.hpp"

using namespace fbtrack;

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = stats::mean_se(v);
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("batch means see serial correlation that the iid formula misses") {
  std::vector<double> v;
  for (int b = 0; b < 50; ++b)
    for (int i = 0; i < 100; ++i) v.push_back(b % 2 ? 1.0 : -1.0);
  const auto iid = stats::mean_se(v);
  const auto bm = stats::batch_mean_se(v, 50);
  CHECK(bm.mean == doctest::Approx(iid.mean));
  CHECK(bm.std_error > 5.0 * iid.std_error);
}

TEST_CASE("chi-square against equal probabilities") {
  const std::vector<std::uint64_t> flat{100, 100, 100, 100};
  const auto c = stats::chi_square_uniform(flat);
  CHECK(c.statistic == 0.0);
  CHECK(c.dof == 3);
  CHECK(c.p_value == doctest::Approx(1.0));
  const std::vector<std::uint64_t> skew{400, 0, 0, 0};
  CHECK(stats::chi_square_uniform(skew).p_value < 1e-100);
  // chi2 with 2 dof has survival exp(-x/2).
  const std::vector<std::uint64_t> three{20, 10, 30};
  const auto t = stats::chi_square_uniform(three);
  CHECK(t.statistic == doctest::Approx(10.0));
  CHECK(t.p_value == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.push_back((i + 0.5) / 10.0);
  CHECK(stats::ks_statistic(x, [](double u) { return u; }) == doctest::Approx(0.05));
  CHECK(stats::ks_statistic({0.5}, [](double u) { return u; }) == doctest::Approx(0.5));
}
