#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fbtrack {

/// Sample circular moments of a set of angles.
struct CircularSummary {
  double c_bar = 0.0;          ///< mean cosine
  double s_bar = 0.0;          ///< mean sine
  double r_bar = 0.0;          ///< mean resultant length
  double mu_bar = 0.0;         ///< mean direction atan2(s_bar, c_bar)
  double circ_variance = 0.0;  ///< 1 - r_bar
  double c_std_error = 0.0;    ///< i.i.d. standard error of c_bar
  double s_std_error = 0.0;    ///< i.i.d. standard error of s_bar
  std::size_t sample_count = 0;
};

CircularSummary circular_summary(std::span<const double> samples);

/// Where the L uniform cells sit on [-pi, pi).
///  - edge:     cell i = [-pi + i D, -pi + (i+1) D), D = 2 pi / L.
///  - centered: cell i is centred on -pi + i D (so 0 is a cell centre and
///              cell 0 straddles the +-pi seam).
enum class BinAlignment { edge, centered };

std::uint32_t quantize_angle(double angle, int levels, BinAlignment align = BinAlignment::edge);

std::vector<std::uint32_t> quantize_uniform(std::span<const double> samples, int levels,
                                            BinAlignment align = BinAlignment::edge);

/// Plug-in entropy of a quantised angle (or angle vector) sample.
///
/// continuous_bits = discrete_bits + dimension * log2(2 pi / L) always holds.
/// std_error comes from batch means over contiguous blocks of the sample, so it
/// stays honest for serially correlated sequences; bias_bound is the
/// Miller-Madow term (occupied - 1) / (2 N ln 2).
struct EntropyEstimate {
  int levels = 0;
  int dimension = 1;
  double discrete_bits = 0.0;
  double continuous_bits = 0.0;
  std::size_t sample_count = 0;
  std::size_t occupied_cells = 0;
  double std_error = 0.0;
  double bias_bound = 0.0;
};

inline constexpr int kDefaultEntropyBatches = 100;

/// Entropy of scalar bin indices in [0, L).
EntropyEstimate discrete_entropy(std::span<const std::uint32_t> bins, int levels,
                                 int batches = kDefaultEntropyBatches);

/// Joint entropy of `dimension`-vectors stored row-major in `samples`, each
/// coordinate quantised to L levels. Throws CapacityError when L^d > 2^24.
EntropyEstimate joint_discrete_entropy(std::span<const double> samples, int dimension, int levels,
                                       BinAlignment align = BinAlignment::edge,
                                       int batches = kDefaultEntropyBatches);

/// Reduction in feedback entropy from differential encoding: h(theta) - h(eps).
double mutual_information_steering(double h_theta_bits, double h_eps_bits);

/// Count histogram of quantised angles; shards merge by adding counts.
class AngleHistogram {
 public:
  explicit AngleHistogram(int levels, BinAlignment align = BinAlignment::edge);

  void add(double angle) { ++counts_[quantize_angle(angle, levels_, align_)]; }
  void merge(const AngleHistogram& other);

  int levels() const { return levels_; }
  std::uint64_t total() const;
  std::span<const std::uint64_t> counts() const { return counts_; }
  /// Plug-in entropy of the counts (std_error left at 0: no sample order is kept).
  EntropyEstimate entropy() const;

 private:
  int levels_;
  BinAlignment align_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace fbtrack
