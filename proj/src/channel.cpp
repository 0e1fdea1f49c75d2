#include "fbtrack/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fbtrack/errors.hpp"
#include "fbtrack/specfun.hpp"

namespace fbtrack {
namespace {

CorrelationParams from_rho(double f_n, double rho) {
  CorrelationParams p;
  p.f_n = f_n;
  p.rho = rho;
  const double a = std::abs(rho);
  p.rho_c = std::sqrt(std::max(0.0, (1.0 - a) * (1.0 + a)));
  p.k = fog_concentration(rho);
  return p;
}

// Principal-branch inverse of rho = J0(2 pi f) for rho in (0, 1].
double fn_of_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) return std::numeric_limits<double>::quiet_NaN();
  if (rho == 1.0) return 0.0;
  double lo = 0.0;
  double hi = specfun::kJ0FirstZero / (2.0 * std::numbers::pi);
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (specfun::bessel_j0(2.0 * std::numbers::pi * mid) > rho) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fog_concentration(double rho) {
  if (!std::isfinite(rho) || std::abs(rho) > 1.0) {
    throw DomainError("fog_concentration: |rho| must be <= 1");
  }
  const double r2 = rho * rho;
  const double r4 = r2 * r2;
  const double a = std::abs(rho);
  // 1 - rho^4 = (1 - |rho|)(1 + |rho|)(1 + rho^2), exact near |rho| = 1.
  const double denom = (1.0 - a) * (1.0 + a) * (1.0 + r2);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return r4 / denom;
}

CorrelationParams params_from_fn(double f_n) {
  if (!std::isfinite(f_n) || f_n < 0.0) {
    throw DomainError("params_from_fn: normalized Doppler must be finite and >= 0");
  }
  return from_rho(f_n, specfun::bessel_j0(2.0 * std::numbers::pi * f_n));
}

CorrelationParams params_from_doppler(double f_d, double tau) {
  if (!std::isfinite(f_d) || f_d < 0.0 || !std::isfinite(tau) || tau < 0.0) {
    throw DomainError("params_from_doppler: f_D and tau must be finite and >= 0");
  }
  CorrelationParams p = params_from_fn(f_d * tau);
  p.f_d = f_d;
  p.tau = tau;
  return p;
}

CorrelationParams params_from_rho(double rho) {
  if (!std::isfinite(rho) || std::abs(rho) > 1.0) {
    throw DomainError("params_from_rho: |rho| must be <= 1");
  }
  return from_rho(fn_of_rho(rho), rho);
}

EntryStreams::EntryStreams(std::uint64_t seed, int n_r, int n_t, std::uint64_t sequence_id)
    : n_r_(n_r), n_t_(n_t) {
  if (n_r < 1 || n_t < 1) throw DomainError("EntryStreams: dimensions must be positive");
  streams_.reserve(static_cast<std::size_t>(n_r) * n_t);
  for (int e = 0; e < n_r * n_t; ++e) {
    streams_.emplace_back(substream_key(seed, sequence_id, static_cast<std::uint64_t>(e)));
  }
}

ChannelState init_channel(int n_r, int n_t, EntryStreams& streams) {
  if (n_r < 1 || n_t < 2) throw DomainError("init_channel: need n_r >= 1 and n_t >= 2");
  if (streams.n_r() != n_r || streams.n_t() != n_t) {
    throw DomainError("init_channel: stream layout does not match dimensions");
  }
  ChannelState s;
  s.matrix.resize(n_r, n_t);
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_r; ++i) s.matrix(i, j) = streams.draw(i, j);
  }
  s.slot_index = 0;
  return s;
}

ChannelState init_channel(int n_r, int n_t, std::uint64_t seed) {
  if (n_r < 1 || n_t < 2) throw DomainError("init_channel: need n_r >= 1 and n_t >= 2");
  EntryStreams streams(seed, n_r, n_t);
  return init_channel(n_r, n_t, streams);
}

void step_channel(ChannelState& state, const CorrelationParams& params, EntryStreams& streams) {
  const int n_r = state.n_r();
  const int n_t = state.n_t();
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_r; ++i) {
      const std::complex<double> u = streams.draw(i, j);
      state.matrix(i, j) = params.rho * state.matrix(i, j) + params.rho_c * u;
    }
  }
  ++state.slot_index;
}

ChannelSequence::ChannelSequence(int n_r, int n_t, const CorrelationParams& params,
                                 std::uint64_t seed, std::uint64_t sequence_id)
    : params_(params), streams_(seed, n_r, n_t, sequence_id),
      state_(init_channel(n_r, n_t, streams_)) {}

}  // namespace fbtrack
