#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "fbtrack/rng.hpp"

namespace fbtrack {

/// Temporal-correlation parameters of the first-order Gauss-Markov channel.
///
/// rho = J0(2 pi f_N), rho_c = sqrt(1 - rho^2), f_N = f_D * tau and
/// k = rho^4 / (1 - rho^4). k is +inf for a static channel (rho = +-1).
struct CorrelationParams {
  double f_n = 0.0;
  std::optional<double> f_d;  ///< maximum Doppler frequency [Hz], when known
  std::optional<double> tau;  ///< slot duration [s], when known
  double rho = 1.0;
  double rho_c = 0.0;
  double k = 0.0;
};

/// k = rho^4 / (1 - rho^4); +inf when |rho| = 1.
double fog_concentration(double rho);

CorrelationParams params_from_fn(double f_n);
CorrelationParams params_from_doppler(double f_d, double tau);

/// Parameters for a given correlation coefficient; f_n is the principal-branch
/// inverse when rho lies in (0, 1], NaN otherwise.
CorrelationParams params_from_rho(double rho);

/// One slot of the N_R x N_T channel.
struct ChannelState {
  Eigen::MatrixXcd matrix;
  std::int64_t slot_index = 0;

  int n_r() const { return static_cast<int>(matrix.rows()); }
  int n_t() const { return static_cast<int>(matrix.cols()); }
};

/// Independent CN(0,1) substreams, one per matrix entry (column-major order).
class EntryStreams {
 public:
  EntryStreams(std::uint64_t seed, int n_r, int n_t, std::uint64_t sequence_id = 0);

  std::complex<double> draw(int row, int col) {
    return streams_[static_cast<std::size_t>(col * n_r_ + row)].complex_normal();
  }
  int n_r() const { return n_r_; }
  int n_t() const { return n_t_; }

 private:
  int n_r_;
  int n_t_;
  std::vector<CounterRng> streams_;
};

/// Slot-0 channel with i.i.d. CN(0,1) entries drawn from `streams`.
ChannelState init_channel(int n_r, int n_t, EntryStreams& streams);

/// Convenience: deterministic slot-0 channel from a seed.
ChannelState init_channel(int n_r, int n_t, std::uint64_t seed);

/// In-place Gauss-Markov update h <- rho h + rho_c u, u ~ CN(0,1) fresh per entry.
void step_channel(ChannelState& state, const CorrelationParams& params, EntryStreams& streams);

/// A channel realisation that owns its state and random substreams.
class ChannelSequence {
 public:
  ChannelSequence(int n_r, int n_t, const CorrelationParams& params, std::uint64_t seed,
                  std::uint64_t sequence_id = 0);

  const ChannelState& state() const { return state_; }
  const CorrelationParams& params() const { return params_; }
  void step() { step_channel(state_, params_, streams_); }

 private:
  CorrelationParams params_;
  EntryStreams streams_;
  ChannelState state_;
};

}  // namespace fbtrack
