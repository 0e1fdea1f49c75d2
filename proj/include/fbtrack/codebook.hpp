#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fbtrack {

enum class CodebookKind { steering, tracking };

struct CodebookMetadata {
  std::optional<double> f_n;            ///< NDF of the training data (tracking)
  int levels = 0;                       ///< L (steering)
  std::uint64_t seed = 0;
  int iterations = 0;                   ///< Lloyd iterations run
  std::vector<double> distortion_history;  ///< mean distortion after each assignment
};

/// Phase codebook over the N_T - 1 non-reference antennas.
struct Codebook {
  CodebookKind kind = CodebookKind::steering;
  int n_t = 2;
  std::vector<double> entries;  ///< row-major, (n_t - 1) angles per codeword
  double bits = 0.0;
  CodebookMetadata metadata;

  int dimension() const { return n_t - 1; }
  std::size_t size() const { return entries.size() / static_cast<std::size_t>(dimension()); }
  std::span<const double> entry(std::size_t i) const {
    const auto d = static_cast<std::size_t>(dimension());
    return {entries.data() + i * d, d};
  }
};

inline constexpr std::size_t kMaxCodebookSearch = std::size_t{1} << 20;

/// Uniform product grid of bin centres -pi + (i + 1/2) 2pi/L; bits = (N_T-1) log2 L.
/// Throws CapacityError when L^(N_T-1) > 2^20.
Codebook steering_codebook(int n_t, int levels);

/// Sum over coordinates of wrap(a_i - b_i)^2.
double wrapped_distortion(std::span<const double> a, std::span<const double> b);

/// Mean wrapped distortion of each sample to its nearest codeword.
double codebook_distortion(const Codebook& cb, std::span<const double> samples);

/// Generalised Lloyd training on tracking vectors (row-major, dimension = n_t - 1).
///
/// Initial codewords are T samples drawn with `seed`; the centroid step is the
/// per-coordinate circular mean, kept only where it does not raise the cell's
/// distortion, so the recorded distortion never increases. Empty cells are
/// re-seeded with the worst-fit sample of the highest-distortion cell.
/// Needs at least 100 T samples.
Codebook train_tracking_codebook(int codewords, std::span<const double> samples, int n_t,
                                 int max_iter, double tol, std::uint64_t seed,
                                 std::optional<double> training_f_n = std::nullopt);

/// Per-chain record of the selections, enough for a decoder to replay.
struct SelectionLog {
  std::uint32_t acquisition_index = 0;   ///< steering-grid index at slot 0 (tracking)
  std::vector<std::uint32_t> indices;    ///< codeword index per slot (slot 0 excluded for tracking)
  std::vector<double> reconstructions;   ///< selected phases per slot, row-major
};

struct SnrOptions {
  int chains = 10;              ///< independent channel realisations sharing the slots
  int threads = 1;
  bool keep_logs = false;
  int acquisition_levels = 128;  ///< steering grid used for tracking slot 0
  int batches = 100;
};

struct SnrResult {
  double mean_snr = 0.0;
  double std_error = 0.0;       ///< batch means over the concatenated chains
  double reference_snr = 0.0;   ///< unquantised coordinate-ascent SNR on the same channels
  double reference_std_error = 0.0;
  std::size_t slots = 0;
  std::vector<SelectionLog> logs;
};

/// Average ||H v||^2 with exhaustive max-SNR codeword selection along simulated
/// channel sequences. Tracking codebooks select theta_hat[n-1] + c (wrapped);
/// theta_hat[-1] comes from a steering grid at slot 0.
SnrResult evaluate_avg_snr(const Codebook& cb, int n_r, int n_t, double f_n, std::size_t n_slots,
                           std::uint64_t seed, const SnrOptions& opts = {});

/// Decoder side: rebuilds the reconstructed phase sequence from a log.
std::vector<double> replay_selections(const Codebook& cb, const SelectionLog& log,
                                      int acquisition_levels = 128);

std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace fbtrack
