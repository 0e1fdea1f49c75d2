#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <string>

namespace fbtrack::quad {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
/// Stops once abs_error <= max(abs_tol, rel_tol * |value|).
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, with the interval pre-split at interior points (kinks, singularities).
/// `points` must be sorted; entries outside (a, b) are ignored.
Result integrate(const Integrand& f, double a, double b, std::span<const double> points,
                 const Options& opts = {});

/// integrate() that throws NumericError (with the achieved error in the message)
/// instead of returning an unconverged result.
double integrate_checked(const Integrand& f, double a, double b, std::span<const double> points,
                         const Options& opts, const std::string& what);

inline double integrate_checked(const Integrand& f, double a, double b, const Options& opts,
                                const std::string& what) {
  return integrate_checked(f, a, b, {}, opts, what);
}

}  // namespace fbtrack::quad
