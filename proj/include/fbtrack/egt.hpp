#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fbtrack/channel.hpp"

namespace fbtrack {

enum class PhaseKind { steering, tracking };

/// Wraps an angle into [-pi, pi).
double wrap_angle(double x);

/// Phases of antennas 1..N_T-1 (antenna 0 is the zero-phase reference).
struct PhaseVector {
  std::vector<double> angles;
  PhaseKind kind = PhaseKind::steering;
  std::int64_t slot_index = 0;

  std::size_t size() const { return angles.size(); }
};

/// v = (1/sqrt(N_T)) [1, e^{j theta_1}, ..., e^{j theta_{N_T-1}}].
struct BeamformingVector {
  Eigen::VectorXcd entries;
};

BeamformingVector beamform_from_phases(const PhaseVector& phases, int n_t);

/// Output SNR ||H v||^2 (unit noise power).
double egt_objective(const Eigen::MatrixXcd& h, const BeamformingVector& v);
inline double egt_objective(const ChannelState& h, const BeamformingVector& v) {
  return egt_objective(h.matrix, v);
}

/// ||H v||^2 for the beamformer built from `angles` (no allocation of a PhaseVector).
double egt_objective(const Eigen::MatrixXcd& h, std::span<const double> angles);

/// Exact maximiser over theta_l (1 <= l <= N_T-1) with the other phases held:
/// angle(h_l^H h_{l,c}). Returns 0 when h_l^H h_{l,c} vanishes.
double optimal_coordinate_phase(const Eigen::MatrixXcd& h, const PhaseVector& current, int l);

struct SteeringOptions {
  double tol = 1e-10;    ///< relative objective gain per sweep that counts as converged
  int max_sweeps = 200;
  bool record_trace = false;
  /// Cold starts also try the dominant right singular vector's phases.
  bool dual_cold_start = true;
};

struct SteeringSolution {
  PhaseVector phases;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  /// Objective after every coordinate update (only when record_trace is set).
  std::vector<double> trace;
};

/// Cyclic coordinate ascent on ||H v||^2, each step the exact coordinate maximiser.
/// The objective never decreases between updates. Without `init` the search
/// is cold-started; with `init` it is warm-started from those phases only.
SteeringSolution solve_steering(const Eigen::MatrixXcd& h, const std::optional<PhaseVector>& init,
                                const SteeringOptions& opts = {});

/// eps = wrap(theta_now - theta_prev), element-wise.
PhaseVector tracking_from_steering(const PhaseVector& theta_now, const PhaseVector& theta_prev);

/// theta_prev + eps, wrapped. Inverse of tracking_from_steering.
PhaseVector apply_tracking(const PhaseVector& theta_prev, const PhaseVector& eps);

/// Follows the steering optimum along a channel sequence and emits tracking vectors.
class PhaseTracker {
 public:
  explicit PhaseTracker(bool warm_start = true, SteeringOptions opts = {});

  struct Step {
    PhaseVector theta;
    std::optional<PhaseVector> epsilon;  ///< absent on the first slot
    bool converged = true;
  };

  Step next(const ChannelState& state);
  void reset() { previous_.reset(); }

 private:
  bool warm_start_;
  SteeringOptions opts_;
  std::optional<PhaseVector> previous_;
};

}  // namespace fbtrack
