#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fbtrack/circstats.hpp"

namespace fbtrack {

// --- Feedback overhead generator (FOG) gamma * e^{j psi} -------------------
//
// The tracking value of one antenna is eps = angle(1 + gamma e^{j psi}) with
// psi uniform on [-pi, pi) and gamma the ratio of two Rayleigh magnitudes:
//   f(x) = 2 k x / (1 + k x^2)^2,   F(x) = k x^2 / (1 + k x^2),
// where k = rho^4 / (1 - rho^4).

double fog_pdf(double x, double k);
double fog_cdf(double x, double k);
/// Inverse CDF: x = sqrt(u / (k (1 - u))).
double fog_quantile(double u, double k);

struct FogSamples {
  std::vector<double> gamma;
  std::vector<double> psi;
};

/// Inverse-CDF sampler: gamma from F^{-1}(u), psi uniform, independent streams.
FogSamples sample_fog(double k, std::size_t n, std::uint64_t seed);

/// Direct construction gamma e^{j phi} = alpha_5 / (sqrt(k) |alpha_1|) from two
/// explicit CN(0,1) draws; psi = angle(alpha_5) - angle(alpha_1). Shares no
/// code path with sample_fog.
FogSamples sample_fog_ratio(double k, std::size_t n, std::uint64_t seed);

/// atan2(gamma sin psi, 1 + gamma cos psi) in [-pi, pi); 0 for a zero resultant.
double eps_given_fog(double gamma, double psi);

// --- Conditional statistics given gamma ------------------------------------

/// Piecewise variance bound: 1/sqrt(1 - gamma^2) - 1 below 1, pi^2/3 from 1 on.
double cond_var_upper(double gamma);

/// E[eps^2 | gamma] by quadrature over psi (the conditional mean is 0).
double cond_var_exact(double gamma, double rel_tol = 1e-10);

/// E[cos eps | gamma] by quadrature of (1 + g cos psi) / sqrt(1 + g^2 + 2 g cos psi).
double cbar_eps_given_gamma(double gamma, double rel_tol = 1e-10);

/// g(gamma) = ((1 - gamma) E(m) + (1 + gamma) K(m)) / pi, m = -4 gamma / (gamma - 1)^2.
/// Throws DomainError at gamma = 1.
double fog_g(double gamma);

/// Elliptic closed form of E[cos eps | gamma]: g(gamma) below 1, -g(gamma) above.
double cbar_eps_elliptic(double gamma);

/// Lower bound on E[cos eps | gamma]: 1 - gamma^2/2 below 1, the arctan form
/// above, and its right limit 1/2 at gamma = 1.
double cbar_lower(double gamma);

// --- Averages over gamma ----------------------------------------------------

/// Closed-form variance bound sqrt(k/(1+k)^3) asinh(sqrt k) + pi^2/(3 + 3k).
double sigma_u_sq(double k);

/// Exact variance of eps under the FOG law (nested quadrature, outer domain
/// mapped to u = F(gamma) in [0, 1]).
double sigma_eps_sq_numeric(double k, double quad_tol = 1e-8);

double c1_of_k(double k);
double c2_of_k(double k);
/// Closed-form MRL lower bound c1(k) + c2(k).
double rbar_L(double k);

/// Exact MRL of eps under the FOG law (equal to E[cos eps] since E[sin eps] = 0).
double rbar_eps_numeric(double k, double quad_tol = 1e-8);

// --- Maximum-entropy bounds -------------------------------------------------

/// log2 sqrt(2 pi e variance).
double gaussian_entropy_bits(double variance);

/// Entropy of the von Mises law with mean resultant length rbar.
double vonmises_entropy_bits(double rbar);

/// Entropy of the von Mises law with concentration kappa.
double vonmises_entropy_from_kappa(double kappa);

enum class BoundKind { gaussian_numeric, gaussian_closed, vonmises_numeric, vonmises_closed };

std::string_view to_string(BoundKind kind);
BoundKind parse_bound_kind(std::string_view name);

struct EntropyBound {
  BoundKind kind = BoundKind::vonmises_closed;
  double value_bits = 0.0;
  double intermediate = 0.0;  ///< variance (Gaussian kinds) or MRL (von Mises kinds)
  double k = 0.0;
};

/// One entropy bound at FOG concentration k >= 0 (k = 0 is the uniform limit).
EntropyBound entropy_bound(BoundKind kind, double k, double quad_tol = 1e-8);

/// The four bounds in the order gaussian_numeric, gaussian_closed,
/// vonmises_numeric, vonmises_closed.
std::array<EntropyBound, 4> bound_suite(double k, double quad_tol = 1e-8);

struct AsymptoticGaps {
  double gaussian_gap_bits = 0.0;
  double vonmises_gap_bits = 0.0;
};

/// Fast-fading gaps between the closed-form bounds and the exact entropy.
AsymptoticGaps asymptotic_gaps();

/// Discrete counterpart of a per-element bound on L cells through
/// H = h + log2(L / 2pi), floored at 0 (a discrete entropy cannot be negative).
double discrete_bound_bits(double continuous_bits, int levels);

/// Entropy of the bound's maximum-entropy density (von Mises, or zero-mean
/// wrapped normal) after quantisation onto L uniform cells.
double quantized_bound_bits(const EntropyBound& bound, int levels,
                            BinAlignment align = BinAlignment::centered);

double quantized_vonmises_entropy_bits(double rbar, int levels, BinAlignment align);
double quantized_gaussian_entropy_bits(double variance, int levels, BinAlignment align);

}  // namespace fbtrack
