#include "fbtrack/quadrature.hpp"

#include <array>
#include <cmath>
#include <fmt/format.h>
#include <queue>
#include <vector>

#include "fbtrack/errors.hpp"

namespace fbtrack::quad {
namespace {

// Kronrod abscissae (positive half) and weights; every other node is a Gauss node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  return {a, b, value, error};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, std::span<const double> points,
                 const Options& opts) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<double> cuts{a};
  for (double p : points) {
    if (p > a && p < b && p > cuts.back()) cuts.push_back(p);
  }
  cuts.push_back(b);

  std::priority_queue<Segment> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Segment s = gk15(f, cuts[i], cuts[i + 1]);
    total += s.value;
    error += s.error;
    heap.push(s);
    out.evaluations += 15;
  }

  auto done = [&] { return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!done() && static_cast<int>(heap.size()) < opts.max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  out.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return out;
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  return integrate(f, a, b, std::span<const double>{}, opts);
}

double integrate_checked(const Integrand& f, double a, double b, std::span<const double> points,
                         const Options& opts, const std::string& what) {
  const Result r = integrate(f, a, b, points, opts);
  if (!r.converged || !std::isfinite(r.value)) {
    throw NumericError(fmt::format(
        "{}: quadrature did not converge on [{}, {}] (value {:.12g}, error estimate {:.3g}, "
        "{} intervals, {} evaluations, rel_tol {:.1g})",
        what, a, b, r.value, r.abs_error, r.intervals, r.evaluations, opts.rel_tol));
  }
  return r.value;
}

}  // namespace fbtrack::quad
