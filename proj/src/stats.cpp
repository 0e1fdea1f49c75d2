#include "fbtrack/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "fbtrack/errors.hpp"

namespace fbtrack::stats {

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                              static_cast<double>(values.size()));
  }
  return out;
}

MeanSe batch_mean_se(std::span<const double> values, int batches) {
  const std::size_t n = values.size();
  if (batches < 2 || n < 2 * static_cast<std::size_t>(batches)) return mean_se(values);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
    const std::size_t hi = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    means.push_back(s / static_cast<double>(hi - lo));
  }
  MeanSe out = mean_se(means);
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  out.n = n;
  return out;
}

ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw DomainError("chi_square_uniform: need at least two cells");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw DomainError("chi_square_uniform: empty histogram");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquare out;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    out.statistic += d * d / expected;
  }
  out.dof = static_cast<int>(counts.size()) - 1;
  out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic);
  return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace fbtrack::stats
