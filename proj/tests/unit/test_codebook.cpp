#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbtrack/codebook.hpp"
#include "fbtrack/egt.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/experiments.hpp"
#include "fbtrack/rng.hpp"

using namespace fbtrack;
constexpr double kPi = std::numbers::pi;

namespace {
std::vector<double> tracking_samples(double f_n, int n_t, std::uint64_t seed) {
  SimulationSpec s;
  s.n_t = n_t;
  s.f_n = f_n;
  s.chains = 40;
  s.slots_per_chain = 500;
  s.seed = seed;
  s.threads = 2;
  return simulate_phase_samples(s).eps;
}
}  // namespace

TEST_CASE("steering codebooks are uniform product grids") {
  const auto a = steering_codebook(2, 2);
  REQUIRE(a.size() == 2);
  CHECK(a.entry(0)[0] == doctest::Approx(-kPi / 2));
  CHECK(a.entry(1)[0] == doctest::Approx(kPi / 2));
  CHECK(a.bits == doctest::Approx(1.0));
  const auto b = steering_codebook(3, 4);
  CHECK(b.size() == 16);
  CHECK(b.bits == doctest::Approx(4.0));
  for (double v : b.entries) {
    CHECK(v >= -kPi);
    CHECK(v < kPi);
  }
  CHECK(b.entry(5)[0] == doctest::Approx(-kPi + 1.5 * kPi / 2));  // digits (1, 1)
  CHECK(b.entry(5)[1] == doctest::Approx(-kPi + 1.5 * kPi / 2));
  CHECK_NOTHROW(steering_codebook(3, 1024));
  CHECK_THROWS_AS(steering_codebook(3, 1025), CapacityError);
  CHECK_THROWS_AS(steering_codebook(1, 4), DomainError);
}

TEST_CASE("Lloyd training on identical samples replicates the point") {
  std::vector<double> x(1000, 0.25);
  const auto cb = train_tracking_codebook(4, x, 2, 50, 1e-9, 1);
  CHECK(cb.size() == 4);
  for (double v : cb.entries) CHECK(v == doctest::Approx(0.25));
  CHECK(codebook_distortion(cb, x) == 0.0);
  CHECK(cb.bits == doctest::Approx(2.0));
}

TEST_CASE("Lloyd distortion never increases and beats random codebooks") {
  const auto x = tracking_samples(0.05, 2, 3);
  const auto cb = train_tracking_codebook(4, x, 2, 200, 1e-10, 9, 0.05);
  const auto& hist = cb.metadata.distortion_history;
  REQUIRE(hist.size() >= 2);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1]);
  CHECK(codebook_distortion(cb, x) == doctest::Approx(hist.back()));
  CounterRng rng(77);
  for (int r = 0; r < 10; ++r) {
    Codebook rnd = cb;
    for (auto& v : rnd.entries) v = x[static_cast<std::size_t>(rng.uniform() * x.size())];
    CHECK(hist.back() <= codebook_distortion(rnd, x));
  }
  CHECK(cb.metadata.f_n.value() == 0.05);
}

TEST_CASE("Lloyd re-seeds empty cells") {
  // Two tight clusters and four codewords: every codeword must end up used.
  std::vector<double> x;
  CounterRng rng(5);
  for (int i = 0; i < 2000; ++i) x.push_back((i % 2 ? 1.0 : -1.0) + 0.05 * rng.normal());
  const auto cb = train_tracking_codebook(4, x, 2, 100, 0.0, 2);
  std::vector<int> used(4, 0);
  for (double v : x) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < 4; ++j)
      if (std::abs(wrap_angle(v - cb.entries[j])) < std::abs(wrap_angle(v - cb.entries[best]))) best = j;
    used[best] = 1;
  }
  CHECK(used[0] + used[1] + used[2] + used[3] == 4);
}

TEST_CASE("training preconditions") {
  std::vector<double> x(399, 0.0);
  CHECK_THROWS_AS(train_tracking_codebook(4, x, 2, 10, 1e-6, 1), DomainError);
  CHECK_THROWS_AS(train_tracking_codebook(1, std::vector<double>(1000, 0.0), 2, 10, 1e-6, 1), DomainError);
  CHECK_THROWS_AS(train_tracking_codebook(2, std::vector<double>(1001, 0.0), 3, 10, 1e-6, 1), DomainError);
}

TEST_CASE("decoder replay reproduces the encoder's reconstruction") {
  const auto x = tracking_samples(0.05, 3, 4);
  const auto cb = train_tracking_codebook(8, x, 3, 100, 1e-7, 5);
  SnrOptions o;
  o.chains = 3;
  o.keep_logs = true;
  o.acquisition_levels = 32;
  const auto r = evaluate_avg_snr(cb, 2, 3, 0.05, 600, 11, o);
  REQUIRE(r.logs.size() == 3);
  for (const auto& log : r.logs) {
    CHECK(log.indices.size() == 199);
    const auto replay = replay_selections(cb, log, 32);
    REQUIRE(replay.size() == log.reconstructions.size());
    for (std::size_t i = 0; i < replay.size(); ++i) CHECK(replay[i] == log.reconstructions[i]);
  }
  const auto st = steering_codebook(3, 4);
  const auto rs = evaluate_avg_snr(st, 2, 3, 0.05, 300, 11, o);
  const auto replay = replay_selections(st, rs.logs[0]);
  for (std::size_t i = 0; i < replay.size(); ++i) CHECK(replay[i] == rs.logs[0].reconstructions[i]);
}

TEST_CASE("quantised SNR never beats the unquantised optimum") {
  SnrOptions o;
  o.chains = 20;
  for (int levels : {2, 8, 64}) {
    const auto r = evaluate_avg_snr(steering_codebook(2, levels), 2, 2, 0.1, 20000, 3, o);
    CHECK(r.mean_snr <= r.reference_snr + 3 * r.reference_std_error);
  }
  // Fine steering grids approach the optimum from below.
  const auto fine = evaluate_avg_snr(steering_codebook(2, 1024), 2, 2, 0.1, 20000, 3, o);
  CHECK(fine.mean_snr <= fine.reference_snr + 1e-12);
  CHECK(fine.mean_snr == doctest::Approx(fine.reference_snr).epsilon(1e-4));
}

TEST_CASE("static channel: tracking with a zero codeword holds the acquisition") {
  Codebook cb;
  cb.kind = CodebookKind::tracking;
  cb.n_t = 2;
  cb.entries = {0.0, 0.4, -0.4};
  cb.bits = std::log2(3.0);
  SnrOptions o;
  o.chains = 1;
  o.keep_logs = true;
  const auto r = evaluate_avg_snr(cb, 2, 2, 0.0, 50, 21, o);
  // Frozen channel: reconstruction stays within half an acquisition cell of the optimum.
  CHECK(r.mean_snr <= r.reference_snr + 1e-12);
  CHECK(r.mean_snr >= r.reference_snr * std::pow(std::cos(kPi / 128), 2) - 1e-12);
  for (auto idx : r.logs[0].indices) CHECK(idx == 0);
}

TEST_CASE("tracking SNR degrades with Doppler") {
  SnrOptions o;
  o.chains = 200;
  std::vector<double> loss;
  for (double f : {0.01, 0.05, 0.1, 0.3}) {
    const auto x = tracking_samples(f, 2, 8);
    const auto cb = train_tracking_codebook(8, x, 2, 100, 1e-7, 9);
    const auto r = evaluate_avg_snr(cb, 2, 2, f, 40000, 12, o);
    loss.push_back(r.reference_snr - r.mean_snr);
  }
  for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] > loss[i - 1]);
}

TEST_CASE("tracking beats steering at equal bits in slow fading") {
  const auto x = tracking_samples(0.01, 2, 31);
  const auto tr = train_tracking_codebook(8, x, 2, 100, 1e-7, 32);
  SnrOptions o;
  o.chains = 50;
  const auto a = evaluate_avg_snr(tr, 2, 2, 0.01, 50000, 33, o);
  const auto b = evaluate_avg_snr(steering_codebook(2, 8), 2, 2, 0.01, 50000, 33, o);
  CHECK(a.mean_snr > b.mean_snr);
}

TEST_CASE("evaluation checks") {
  CHECK_THROWS_AS(evaluate_avg_snr(steering_codebook(3, 4), 2, 2, 0.1, 100, 1), DomainError);
  SnrOptions o;
  o.chains = 10;
  CHECK_THROWS_AS(evaluate_avg_snr(steering_codebook(2, 4), 2, 2, 0.1, 5, 1, o), DomainError);
}

TEST_CASE("codebooks round-trip through JSON") {
  const auto x = tracking_samples(0.1, 3, 40);
  const auto cb = train_tracking_codebook(4, x, 3, 20, 1e-6, 41, 0.1);
  const std::string path = "codebook_roundtrip.json";
  save_codebook(cb, path);
  const auto back = load_codebook(path);
  std::remove(path.c_str());
  CHECK(back.kind == CodebookKind::tracking);
  CHECK(back.n_t == 3);
  CHECK(back.entries == cb.entries);
  CHECK(back.bits == cb.bits);
  CHECK(back.metadata.f_n.value() == 0.1);
  CHECK(back.metadata.distortion_history == cb.metadata.distortion_history);
  const auto st = codebook_from_json(codebook_to_json(steering_codebook(2, 8)));
  CHECK(st.metadata.levels == 8);
  CHECK_FALSE(st.metadata.f_n.has_value());
  CHECK_THROWS_AS(codebook_from_json("{\"format\": \"other\"}"), ConfigError);
  CHECK_THROWS_AS(codebook_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_codebook("/nonexistent/cb.json"), ConfigError);
}
