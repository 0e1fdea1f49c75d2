#pragma once

#include <optional>

#include "fbtrack/bounds.hpp"
#include "fbtrack/circstats.hpp"

namespace fbtrack {

/// Feedback overhead of steering vs tracking for one operating point, in bits
/// per report (all N_T - 1 elements together).
struct OverheadReport {
  int n_t = 2;
  int levels = 128;
  double f_n = 0.0;
  double k = 0.0;
  BoundKind bound_kind = BoundKind::vonmises_closed;

  double steering_bits = 0.0;           ///< (N_T-1) log2 2pi
  double steering_bits_discrete = 0.0;  ///< (N_T-1) log2 L
  double tracking_bits_bound = 0.0;     ///< (N_T-1) h_bound; -inf for a static channel
  double tracking_bits_bound_discrete = 0.0;   ///< (N_T-1) max(0, h_bound + log2(L/2pi))
  double tracking_bits_bound_quantized = 0.0;  ///< (N_T-1) entropy of the quantised bound density
  std::optional<double> tracking_bits_measured;           ///< continuous joint estimate
  std::optional<double> tracking_bits_measured_discrete;  ///< plug-in joint entropy
  double mi_lower_bits = 0.0;           ///< steering_bits - tracking_bits_bound
  double mi_lower_bits_discrete = 0.0;  ///< steering_bits_discrete - tracking_bits_bound_discrete
};

OverheadReport overhead_report(int n_t, int levels, double f_n, BoundKind kind,
                               const std::optional<EntropyEstimate>& measured = std::nullopt);

struct DurationPlan {
  double eta = 0.0;
  double f_d = 0.0;
  int n_t = 2;
  BoundKind bound_kind = BoundKind::vonmises_closed;
  double target_bits = 0.0;   ///< (1 - eta) log2 2pi per element
  double rho_hat = 0.0;
  double k_hat = 0.0;
  double f_n_hat = 0.0;
  double tau_hat = 0.0;       ///< seconds
  double entropy_residual = 0.0;  ///< |h(rho_hat) - target| per element
  double j0_residual = 0.0;       ///< |J0(2 pi f_n_hat) - rho_hat|
  bool bracket_monotone = true;   ///< bound was decreasing on every scanned rho
};

/// Report interval at which the bound on the tracking entropy equals the
/// remainder-information threshold (1 - eta) (N_T-1) log2 2pi.
/// Throws InfeasibleError (with the achievable eta range) when no rho in (0,1) fits.
DurationPlan solve_feedback_duration(double eta, double f_d, int n_t,
                                     BoundKind kind = BoundKind::vonmises_closed);

}  // namespace fbtrack
