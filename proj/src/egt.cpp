#include "fbtrack/egt.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <numbers>

#include "fbtrack/errors.hpp"

namespace fbtrack {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> unit(double angle) { return std::polar(1.0, angle); }

// Unnormalised beam sum s = h_0 + sum_i h_i e^{j theta_i}; objective = ||s||^2 / N_T.
Eigen::VectorXcd beam_sum(const Eigen::MatrixXcd& h, std::span<const double> angles) {
  Eigen::VectorXcd s = h.col(0);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    s += h.col(static_cast<Eigen::Index>(i + 1)) * unit(angles[i]);
  }
  return s;
}

struct AscentRun {
  std::vector<double> angles;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

AscentRun coordinate_ascent(const Eigen::MatrixXcd& h, std::vector<double> angles,
                            const SteeringOptions& opts) {
  const int n_t = static_cast<int>(h.cols());
  const double scale = 1.0 / n_t;
  AscentRun run;
  Eigen::VectorXcd s = beam_sum(h, angles);
  double objective = s.squaredNorm() * scale;
  if (opts.record_trace) run.trace.push_back(objective);

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double start = objective;
    for (int l = 1; l < n_t; ++l) {
      double& theta = angles[static_cast<std::size_t>(l - 1)];
      const Eigen::VectorXcd rest = s - h.col(l) * unit(theta);
      const std::complex<double> z = h.col(l).dot(rest);  // h_l^H h_{l,c}
      const double candidate = (z == std::complex<double>(0.0, 0.0)) ? 0.0 : wrap_angle(std::arg(z));
      Eigen::VectorXcd moved = rest + h.col(l) * unit(candidate);
      const double value = moved.squaredNorm() * scale;
      if (value >= objective) {
        theta = candidate;
        s = std::move(moved);
        objective = value;
      }
      if (opts.record_trace) run.trace.push_back(objective);
    }
    run.sweeps = sweep + 1;
    if (objective - start <= opts.tol * start) {
      run.converged = true;
      break;
    }
  }
  run.angles = std::move(angles);
  run.objective = objective;
  return run;
}

std::vector<double> dominant_mode_phases(const Eigen::MatrixXcd& h) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinV);
  const Eigen::VectorXcd v = svd.matrixV().col(0);
  const std::complex<double> ref = std::abs(v(0)) > 0.0 ? std::conj(v(0)) / std::abs(v(0))
                                                        : std::complex<double>(1.0, 0.0);
  std::vector<double> angles(static_cast<std::size_t>(h.cols() - 1));
  for (Eigen::Index i = 1; i < h.cols(); ++i) {
    angles[static_cast<std::size_t>(i - 1)] = wrap_angle(std::arg(v(i) * ref));
  }
  return angles;
}

void check_lengths(std::size_t a, std::size_t b, const char* fn) {
  if (a != b) throw DomainError(std::string(fn) + ": phase vector lengths differ");
}

}  // namespace

double wrap_angle(double x) {
  if (!std::isfinite(x)) throw DomainError("wrap_angle: non-finite angle");
  if (x >= -kPi && x < kPi) return x;
  double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

BeamformingVector beamform_from_phases(const PhaseVector& phases, int n_t) {
  if (n_t < 1 || phases.size() != static_cast<std::size_t>(n_t - 1)) {
    throw DomainError("beamform_from_phases: expected n_t - 1 phases");
  }
  BeamformingVector v;
  v.entries.resize(n_t);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_t));
  v.entries(0) = amp;
  for (int i = 1; i < n_t; ++i) v.entries(i) = std::polar(amp, phases.angles[i - 1]);
  return v;
}

double egt_objective(const Eigen::MatrixXcd& h, const BeamformingVector& v) {
  if (h.cols() != v.entries.size()) {
    throw DomainError("egt_objective: channel columns do not match beamformer length");
  }
  return (h * v.entries).squaredNorm();
}

double egt_objective(const Eigen::MatrixXcd& h, std::span<const double> angles) {
  if (static_cast<Eigen::Index>(angles.size()) + 1 != h.cols()) {
    throw DomainError("egt_objective: expected n_t - 1 phases");
  }
  return beam_sum(h, angles).squaredNorm() / static_cast<double>(h.cols());
}

double optimal_coordinate_phase(const Eigen::MatrixXcd& h, const PhaseVector& current, int l) {
  const int n_t = static_cast<int>(h.cols());
  if (l < 1 || l >= n_t) throw DomainError("optimal_coordinate_phase: l must be in [1, n_t)");
  check_lengths(current.size(), static_cast<std::size_t>(n_t - 1), "optimal_coordinate_phase");
  Eigen::VectorXcd rest = h.col(0);
  for (int i = 1; i < n_t; ++i) {
    if (i != l) rest += h.col(i) * unit(current.angles[static_cast<std::size_t>(i - 1)]);
  }
  const std::complex<double> z = h.col(l).dot(rest);
  if (z == std::complex<double>(0.0, 0.0)) return 0.0;
  return wrap_angle(std::arg(z));
}

SteeringSolution solve_steering(const Eigen::MatrixXcd& h, const std::optional<PhaseVector>& init,
                                const SteeringOptions& opts) {
  const int n_t = static_cast<int>(h.cols());
  if (n_t < 2 || h.rows() < 1) throw DomainError("solve_steering: need n_t >= 2 and n_r >= 1");
  const auto width = static_cast<std::size_t>(n_t - 1);

  AscentRun best;
  if (init) {
    check_lengths(init->size(), width, "solve_steering");
    std::vector<double> start(init->angles);
    for (double& a : start) a = wrap_angle(a);
    best = coordinate_ascent(h, std::move(start), opts);
  } else {
    best = coordinate_ascent(h, std::vector<double>(width, 0.0), opts);
    if (opts.dual_cold_start && n_t > 2) {
      AscentRun alt = coordinate_ascent(h, dominant_mode_phases(h), opts);
      if (alt.objective > best.objective) best = std::move(alt);
    }
  }

  SteeringSolution out;
  out.phases.angles = std::move(best.angles);
  out.phases.kind = PhaseKind::steering;
  out.objective = best.objective;
  out.sweeps = best.sweeps;
  out.converged = best.converged;
  out.trace = std::move(best.trace);
  return out;
}

PhaseVector tracking_from_steering(const PhaseVector& theta_now, const PhaseVector& theta_prev) {
  check_lengths(theta_now.size(), theta_prev.size(), "tracking_from_steering");
  PhaseVector eps;
  eps.kind = PhaseKind::tracking;
  eps.slot_index = theta_now.slot_index;
  eps.angles.resize(theta_now.size());
  for (std::size_t i = 0; i < theta_now.size(); ++i) {
    eps.angles[i] = wrap_angle(theta_now.angles[i] - theta_prev.angles[i]);
  }
  return eps;
}

PhaseVector apply_tracking(const PhaseVector& theta_prev, const PhaseVector& eps) {
  check_lengths(theta_prev.size(), eps.size(), "apply_tracking");
  PhaseVector theta;
  theta.kind = PhaseKind::steering;
  theta.slot_index = theta_prev.slot_index + 1;
  theta.angles.resize(theta_prev.size());
  for (std::size_t i = 0; i < theta_prev.size(); ++i) {
    theta.angles[i] = wrap_angle(theta_prev.angles[i] + eps.angles[i]);
  }
  return theta;
}

PhaseTracker::PhaseTracker(bool warm_start, SteeringOptions opts)
    : warm_start_(warm_start), opts_(opts) {}

PhaseTracker::Step PhaseTracker::next(const ChannelState& state) {
  std::optional<PhaseVector> init;
  if (warm_start_ && previous_) init = previous_;
  SteeringSolution sol = solve_steering(state.matrix, init, opts_);
  sol.phases.slot_index = state.slot_index;

  Step step;
  step.converged = sol.converged;
  if (previous_) step.epsilon = tracking_from_steering(sol.phases, *previous_);
  step.theta = sol.phases;
  previous_ = std::move(sol.phases);
  return step;
}

}  // namespace fbtrack
