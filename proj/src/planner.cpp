#include "fbtrack/planner.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <vector>

#include "fbtrack/channel.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/specfun.hpp"

namespace fbtrack {
namespace {

const double kLog2TwoPi = std::log2(2.0 * std::numbers::pi);

double bound_at_rho(double rho, BoundKind kind) {
  return entropy_bound(kind, fog_concentration(rho)).value_bits;
}

}  // namespace

OverheadReport overhead_report(int n_t, int levels, double f_n, BoundKind kind,
                               const std::optional<EntropyEstimate>& measured) {
  if (n_t < 2) throw DomainError("overhead_report: n_t must be at least 2");
  if (levels < 2) throw DomainError("overhead_report: need at least 2 levels");
  const auto params = params_from_fn(f_n);
  const double dims = n_t - 1;
  OverheadReport r;
  r.n_t = n_t;
  r.levels = levels;
  r.f_n = f_n;
  r.k = params.k;
  r.bound_kind = kind;
  r.steering_bits = dims * kLog2TwoPi;
  r.steering_bits_discrete = dims * std::log2(static_cast<double>(levels));
  if (std::isinf(params.k)) {
    r.tracking_bits_bound = -std::numeric_limits<double>::infinity();
    r.tracking_bits_bound_discrete = 0.0;
    r.tracking_bits_bound_quantized = 0.0;
  } else {
    const auto b = entropy_bound(kind, params.k);
    r.tracking_bits_bound = dims * b.value_bits;
    r.tracking_bits_bound_discrete = dims * discrete_bound_bits(b.value_bits, levels);
    r.tracking_bits_bound_quantized = dims * quantized_bound_bits(b, levels);
  }
  if (measured) {
    if (measured->dimension != n_t - 1 || measured->levels != levels)
      throw DomainError("overhead_report: measured estimate does not match n_t / L");
    r.tracking_bits_measured = measured->continuous_bits;
    r.tracking_bits_measured_discrete = measured->discrete_bits;
  }
  r.mi_lower_bits = r.steering_bits - r.tracking_bits_bound;
  r.mi_lower_bits_discrete = r.steering_bits_discrete - r.tracking_bits_bound_discrete;
  return r;
}

DurationPlan solve_feedback_duration(double eta, double f_d, int n_t, BoundKind kind) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("solve_feedback_duration: eta must lie in (0, 1)");
  if (!(f_d > 0.0) || !std::isfinite(f_d))
    throw DomainError("solve_feedback_duration: f_D must be positive");
  if (n_t < 2) throw DomainError("solve_feedback_duration: n_t must be at least 2");

  DurationPlan p;
  p.eta = eta;
  p.f_d = f_d;
  p.n_t = n_t;
  p.bound_kind = kind;
  p.target_bits = (1.0 - eta) * kLog2TwoPi;

  // Scan rho over (0, 1), dense near 1 where the bound falls steeply.
  std::vector<double> grid;
  for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);
  for (int e = 3; e <= 12; ++e) grid.push_back(1.0 - std::pow(10.0, -e));
  grid.insert(grid.begin(), 1e-4);
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = bound_at_rho(grid[i], kind);
  for (std::size_t i = 1; i < h.size(); ++i)
    if (!(h[i] < h[i - 1])) p.bracket_monotone = false;

  std::size_t hi = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (h[i] - p.target_bits <= 0.0) {
      hi = i;
      break;
    }
  if (hi == 0 || hi == grid.size()) {
    const double eta_min = 1.0 - h.front() / kLog2TwoPi;
    const double eta_max = 1.0 - h.back() / kLog2TwoPi;
    throw InfeasibleError(fmt::format(
        "solve_feedback_duration: eta = {} is not reachable; achievable range is ({:.6g}, {:.6g})",
        eta, eta_min, eta_max));
  }

  double a = grid[hi - 1], b = grid[hi];
  double ga = h[hi - 1] - p.target_bits;
  double mid = b, gm = h[hi] - p.target_bits;
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    gm = bound_at_rho(mid, kind) - p.target_bits;
    if (gm == 0.0) break;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  p.rho_hat = mid;
  p.entropy_residual = std::abs(gm);
  if (p.entropy_residual >= 1e-9)
    throw NumericError(fmt::format("solve_feedback_duration: entropy residual {:.3g} after bisection",
                                   p.entropy_residual));

  const auto params = params_from_rho(p.rho_hat);
  p.k_hat = params.k;
  p.f_n_hat = params.f_n;
  p.j0_residual = std::abs(specfun::bessel_j0(2.0 * std::numbers::pi * p.f_n_hat) - p.rho_hat);
  if (!(p.j0_residual < 1e-9))
    throw NumericError(fmt::format("solve_feedback_duration: J0 inversion residual {:.3g}",
                                   p.j0_residual));
  p.tau_hat = p.f_n_hat / f_d;
  return p;
}

}  // namespace fbtrack
