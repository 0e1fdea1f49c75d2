#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fbtrack::stats {

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean with i.i.d. standard error.
MeanSe mean_se(std::span<const double> values);

/// Mean with the standard error from `batches` contiguous batch means.
MeanSe batch_mean_se(std::span<const double> values, int batches);

/// Pearson chi-square statistic and upper-tail p-value against equal cell probabilities.
struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};
ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts);

/// Kolmogorov-Smirnov distance sup |F_n - F| of a sample against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace fbtrack::stats
