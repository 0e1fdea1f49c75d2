#include "fbtrack/circstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "fbtrack/egt.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/stats.hpp"

namespace fbtrack {
namespace {

constexpr double kPi = std::numbers::pi;

void check_levels(int levels, const char* fn) {
  if (levels < 2) throw DomainError(std::string(fn) + ": need at least 2 levels");
}

EntropyEstimate finish(EntropyEstimate e, std::size_t occupied) {
  e.occupied_cells = occupied;
  e.continuous_bits =
      e.discrete_bits + e.dimension * std::log2(2.0 * kPi / static_cast<double>(e.levels));
  e.bias_bound = e.sample_count > 0 ? static_cast<double>(occupied > 0 ? occupied - 1 : 0) /
                                          (2.0 * static_cast<double>(e.sample_count) *
                                           std::numbers::ln2)
                                    : 0.0;
  return e;
}

template <typename Key, typename CountOf>
EntropyEstimate plug_in(std::span<const Key> keys, CountOf&& count_of, std::size_t occupied,
                        EntropyEstimate e, int batches) {
  const double n = static_cast<double>(keys.size());
  std::vector<double> info(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    info[i] = -std::log2(static_cast<double>(count_of(keys[i])) / n);
  }
  const stats::MeanSe m = stats::batch_mean_se(info, batches);
  e.discrete_bits = std::max(0.0, m.mean);
  e.std_error = m.std_error;
  return finish(e, occupied);
}

}  // namespace

CircularSummary circular_summary(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("circular_summary: empty sample");
  double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
  for (double a : samples) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    sc += c;
    ss += s;
    sc2 += c * c;
    ss2 += s * s;
  }
  const double n = static_cast<double>(samples.size());
  CircularSummary out;
  out.sample_count = samples.size();
  out.c_bar = sc / n;
  out.s_bar = ss / n;
  out.r_bar = std::min(1.0, std::hypot(out.c_bar, out.s_bar));
  out.mu_bar = std::atan2(out.s_bar, out.c_bar);
  out.circ_variance = 1.0 - out.r_bar;
  if (samples.size() > 1) {
    out.c_std_error = std::sqrt(std::max(0.0, sc2 / n - out.c_bar * out.c_bar) / (n - 1.0));
    out.s_std_error = std::sqrt(std::max(0.0, ss2 / n - out.s_bar * out.s_bar) / (n - 1.0));
  }
  return out;
}

std::uint32_t quantize_angle(double angle, int levels, BinAlignment align) {
  check_levels(levels, "quantize_angle");
  const double a = wrap_angle(angle);
  const double scaled = (a + kPi) * (static_cast<double>(levels) / (2.0 * kPi));
  if (align == BinAlignment::edge) {
    const auto i = static_cast<std::int64_t>(std::floor(scaled));
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(i, 0, levels - 1));
  }
  const auto i = static_cast<std::int64_t>(std::floor(scaled + 0.5));
  return static_cast<std::uint32_t>(((i % levels) + levels) % levels);
}

std::vector<std::uint32_t> quantize_uniform(std::span<const double> samples, int levels,
                                            BinAlignment align) {
  check_levels(levels, "quantize_uniform");
  std::vector<std::uint32_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = quantize_angle(samples[i], levels, align);
  return out;
}

EntropyEstimate discrete_entropy(std::span<const std::uint32_t> bins, int levels, int batches) {
  check_levels(levels, "discrete_entropy");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(levels), 0);
  for (auto b : bins) {
    if (b >= static_cast<std::uint32_t>(levels)) {
      throw DomainError("discrete_entropy: bin index out of range");
    }
    ++counts[b];
  }
  EntropyEstimate e;
  e.levels = levels;
  e.dimension = 1;
  e.sample_count = bins.size();
  if (bins.empty()) return finish(e, 0);
  std::size_t occupied = 0;
  for (auto c : counts) occupied += c > 0;
  return plug_in(bins, [&](std::uint32_t b) { return counts[b]; }, occupied, e, batches);
}

EntropyEstimate joint_discrete_entropy(std::span<const double> samples, int dimension, int levels,
                                       BinAlignment align, int batches) {
  check_levels(levels, "joint_discrete_entropy");
  if (dimension < 1) throw DomainError("joint_discrete_entropy: dimension must be >= 1");
  if (samples.size() % static_cast<std::size_t>(dimension) != 0) {
    throw DomainError("joint_discrete_entropy: sample buffer is not a multiple of the dimension");
  }
  const double cells = std::pow(static_cast<double>(levels), dimension);
  if (cells > 16777216.0) {
    throw CapacityError("joint_discrete_entropy: L^d = " + std::to_string(cells) +
                        " exceeds 2^24 cells; estimate per dimension instead");
  }
  const std::size_t n = samples.size() / static_cast<std::size_t>(dimension);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t key = 0;
    for (int d = dimension - 1; d >= 0; --d) {
      key = key * static_cast<std::uint64_t>(levels) +
            quantize_angle(samples[i * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(d)],
                           levels, align);
    }
    keys[i] = key;
  }
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve(std::min<std::size_t>(n, static_cast<std::size_t>(cells)));
  for (auto k : keys) ++counts[k];

  EntropyEstimate e;
  e.levels = levels;
  e.dimension = dimension;
  e.sample_count = n;
  if (n == 0) return finish(e, 0);
  return plug_in(std::span<const std::uint64_t>(keys),
                 [&](std::uint64_t k) { return counts.find(k)->second; }, counts.size(), e,
                 batches);
}

double mutual_information_steering(double h_theta_bits, double h_eps_bits) {
  return h_theta_bits - h_eps_bits;
}

AngleHistogram::AngleHistogram(int levels, BinAlignment align)
    : levels_(levels), align_(align), counts_(static_cast<std::size_t>(std::max(levels, 0)), 0) {
  check_levels(levels, "AngleHistogram");
}

void AngleHistogram::merge(const AngleHistogram& other) {
  if (other.levels_ != levels_ || other.align_ != align_) {
    throw DomainError("AngleHistogram::merge: incompatible histograms");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t AngleHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

EntropyEstimate AngleHistogram::entropy() const {
  EntropyEstimate e;
  e.levels = levels_;
  e.sample_count = total();
  std::size_t occupied = 0;
  const double n = static_cast<double>(e.sample_count);
  for (auto c : counts_) {
    if (c == 0) continue;
    ++occupied;
    const double p = static_cast<double>(c) / n;
    e.discrete_bits -= p * std::log2(p);
  }
  e.discrete_bits = std::max(0.0, e.discrete_bits);
  return finish(e, occupied);
}

}  // namespace fbtrack
