#include "fbtrack/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <numbers>
#include <vector>

#include "fbtrack/bounds.hpp"
#include "fbtrack/channel.hpp"
#include "fbtrack/circstats.hpp"
#include "fbtrack/codebook.hpp"
#include "fbtrack/egt.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/experiments.hpp"
#include "fbtrack/parallel.hpp"
#include "fbtrack/planner.hpp"
#include "fbtrack/rng.hpp"
#include "fbtrack/specfun.hpp"
#include "fbtrack/stats.hpp"

namespace fbtrack {
namespace {

constexpr double kPi = std::numbers::pi;
const double kLog2TwoPi = std::log2(2.0 * kPi);

constexpr std::size_t kChains = 1000;
constexpr std::size_t kSlots = 1000;  // 10^6 samples per run

struct Outcome {
  bool passed = true;
  std::string detail;
  void fail_if(bool bad, const std::string& why) {
    if (bad) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + why;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

PhaseSamples simulate(int n_r, int n_t, double f_n, std::uint64_t seed, int threads) {
  SimulationSpec s;
  s.n_r = n_r;
  s.n_t = n_t;
  s.f_n = f_n;
  s.chains = kChains;
  s.slots_per_chain = kSlots;
  s.seed = seed;
  s.threads = threads;
  return simulate_phase_samples(s);
}

EntropyEstimate scalar_entropy(const std::vector<double>& x) {
  return joint_discrete_entropy(x, 1, 128, BinAlignment::centered, 100);
}

// --- 1 ------------------------------------------------------------------------
Outcome steering_entropy(const AcceptanceOptions& o) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t i = 0;
  for (double f_n : {0.01, 0.5}) {
    const auto s = simulate(2, 2, f_n, substream_key(o.seed, 1, i++), o.threads);
    const auto e = scalar_entropy(s.theta);
    out.note(fmt::format("f_N={}: H={:.4f} h={:.4f}", f_n, e.discrete_bits, e.continuous_bits));
    out.fail_if(std::abs(e.discrete_bits - 7.0) >= 0.01, "discrete entropy off 7 bit");
    out.fail_if(std::abs(e.continuous_bits - kLog2TwoPi) >= 0.01, "continuous entropy off log2 2pi");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.fail_if(secs >= 120.0, fmt::format("runtime {:.1f} s", secs));
  return out;
}

// --- 2 / 12 -------------------------------------------------------------------
Outcome bound_dominance(int n_r, const AcceptanceOptions& o) {
  Outcome out;
  const std::vector<double> grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  int violations = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double f_n = grid[g];
    const auto p = params_from_fn(f_n);
    const auto s = simulate(n_r, 2, f_n, substream_key(substream_key(o.seed, 2, n_r), g), o.threads);
    const auto e = scalar_entropy(s.eps);
    const auto suite = bound_suite(p.k);
    for (const auto& b : suite) {
      const double z = (b.value_bits - e.continuous_bits) / e.std_error;
      if (z < -3.0) {
        ++violations;
        out.fail_if(true, fmt::format("f_N={} {}: bound {:.4f} < h {:.4f} ({:.1f} SE)", f_n,
                                      to_string(b.kind), b.value_bits, e.continuous_bits, z));
      }
    }
    out.fail_if(suite[0].value_bits > suite[1].value_bits + 1e-9,
                fmt::format("f_N={}: h_G(sigma_eps^2) > h_G(sigma_u^2)", f_n));
    out.fail_if(suite[2].value_bits > suite[3].value_bits + 1e-9,
                fmt::format("f_N={}: h_V(R_eps) > h_V(R_L)", f_n));
  }
  if (out.passed) out.note(fmt::format("all 32 bound checks and 16 analytic orderings hold (N_R={})", n_r));
  else out.note(fmt::format("{} of 32 Monte-Carlo checks violated", violations));
  return out;
}

// --- 3 ------------------------------------------------------------------------
Outcome asymptotic_tightness(const AcceptanceOptions& o) {
  Outcome out;
  const auto p = params_from_fn(0.5);
  const auto s = simulate(2, 2, 0.5, substream_key(o.seed, 3), o.threads);
  const auto e = scalar_entropy(s.eps);
  const double hv = entropy_bound(BoundKind::vonmises_closed, p.k).value_bits;
  const double hg = entropy_bound(BoundKind::gaussian_closed, p.k).value_bits;
  const double gap = 0.5 * std::log2(std::numbers::e * kPi / 6.0);
  out.note(fmt::format("h={:.4f} h_V(R_L)-h={:.4f} h_G(sigma_u^2)-h={:.4f} (gap {:.4f})",
                       e.continuous_bits, hv - e.continuous_bits, hg - e.continuous_bits, gap));
  out.fail_if(!(hv - e.continuous_bits < 0.05), "von Mises closed bound not within 0.05 bit");
  out.fail_if(!(std::abs(hg - e.continuous_bits - gap) < 0.05), "Gaussian gap off by >= 0.05 bit");
  return out;
}

// --- 4 ------------------------------------------------------------------------
Outcome slow_fading(const AcceptanceOptions& o) {
  Outcome out;
  const double f_n = 0.001;
  const auto p = params_from_fn(f_n);
  const auto s = simulate(2, 2, f_n, substream_key(o.seed, 4), o.threads);
  const auto e = scalar_entropy(s.eps);
  const auto bg = entropy_bound(BoundKind::gaussian_closed, p.k);
  const auto bv = entropy_bound(BoundKind::vonmises_closed, p.k);
  const double hd_g = discrete_bound_bits(bg.value_bits, 128);
  const double hd_v = discrete_bound_bits(bv.value_bits, 128);
  out.note(fmt::format("H(eps^128)={:.4f} H_G={:.4f} H_V={:.4f} (quantised densities {:.4f} / {:.4f})",
                       e.discrete_bits, hd_g, hd_v, quantized_bound_bits(bg, 128),
                       quantized_bound_bits(bv, 128)));
  out.fail_if(!(e.discrete_bits < 0.3), "measured discrete entropy >= 0.3 bit");
  out.fail_if(!(hd_g < 0.5), "discrete Gaussian closed bound >= 0.5 bit");
  out.fail_if(!(hd_v < 0.5), "discrete von Mises closed bound >= 0.5 bit");
  return out;
}

// --- 5 ------------------------------------------------------------------------
Outcome fog_law(const AcceptanceOptions& o) {
  Outcome out;
  const std::size_t n = 1000000;
  const double limit = 1.63 / std::sqrt(static_cast<double>(n));
  std::uint64_t i = 0;
  for (double k : {0.1, 1.0, 10.0}) {
    auto s = sample_fog_ratio(k, n, substream_key(o.seed, 5, i++));
    const double d = stats::ks_statistic(std::move(s.gamma), [k](double x) { return fog_cdf(x, k); });
    out.note(fmt::format("k={}: D={:.5f}", k, d));
    out.fail_if(!(d < limit), fmt::format("k={} KS {:.5f} >= {:.5f}", k, d, limit));
  }
  return out;
}

// --- 6 ------------------------------------------------------------------------
Outcome lemma_dominance(const AcceptanceOptions& o) {
  Outcome out;
  int v2 = 0, v3 = 0, vc = 0, vs = 0, vo = 0, vp = 0;
  const std::vector<double> g2 = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.5, 3.0, 10.0};
  std::vector<int> bad(g2.size(), 0);
  parallel_for(g2.size(), o.threads, [&](std::size_t i) {
    CounterRng rng(substream_key(o.seed, 6, i));
    std::vector<double> sq(1000000);
    for (auto& v : sq) {
      const double e = eps_given_fog(g2[i], -kPi + 2.0 * kPi * rng.uniform());
      v = e * e;
    }
    const auto m = stats::mean_se(sq);
    bad[i] = m.mean > cond_var_upper(g2[i]) + 3.0 * m.std_error;
  });
  for (int b : bad) v2 += b;

  for (int i = 0; i <= 1000; ++i) {
    const double g = 0.01 * i;
    const double exact = cbar_eps_given_gamma(g);
    if (cbar_lower(g) > exact) ++v3;
    if (g < 1.0 && exact < 0.0) ++vs;
    if (g > 0.0 && g != 1.0) {
      const double ell = cbar_eps_elliptic(g);
      const double signed_g = g < 1.0 ? fog_g(g) : -fog_g(g);
      if (ell != signed_g || std::abs(ell - exact) > 1e-8) ++vs;
    }
  }
  for (int i = 0; i <= 120; ++i) {
    const double k = std::pow(10.0, -3.0 + 0.05 * i);
    if (c1_of_k(k) < 0.0 || c2_of_k(k) < 0.0) ++vc;
    if (i % 4 == 0) {
      if (sigma_eps_sq_numeric(k) > sigma_u_sq(k) + 1e-9) ++vo;
      if (rbar_eps_numeric(k) < rbar_L(k) - 1e-9) ++vo;
    }
    // F' = f by central differences at the median and two flanking points.
    for (double x : {0.3 / std::sqrt(k), 1.0 / std::sqrt(k), 3.0 / std::sqrt(k)}) {
      const double hstep = 1e-5 * x;
      const double deriv = (fog_cdf(x + hstep, k) - fog_cdf(x - hstep, k)) / (2.0 * hstep);
      if (std::abs(deriv - fog_pdf(x, k)) > 1e-6 * std::max(1.0, fog_pdf(x, k))) ++vp;
    }
  }
  out.note(fmt::format("violations: lemma2={} lemma3={} c_i>=0:{} sign={} ordering={} pdf={}", v2,
                       v3, vc, vs, vo, vp));
  out.fail_if(v2 + v3 + vc + vs + vo + vp > 0, "non-zero violations");
  return out;
}

// --- 7 ------------------------------------------------------------------------
Outcome circular_symmetry(const AcceptanceOptions& o) {
  Outcome out;
  const std::size_t n = 1000000;
  const auto p = params_from_fn(0.1);
  std::vector<double> eps(n);
  const std::size_t blocks = 1000;
  parallel_for(blocks, o.threads, [&](std::size_t b) {
    for (std::size_t i = b * (n / blocks); i < (b + 1) * (n / blocks); ++i) {
      ChannelSequence seq(2, 2, p, substream_key(o.seed, 7), i);
      PhaseTracker tracker(true);
      tracker.next(seq.state());
      seq.step();
      eps[i] = tracker.next(seq.state()).epsilon->angles[0];
    }
  });
  const auto c = circular_summary(eps);
  const double limit = 3.0 / std::sqrt(static_cast<double>(n));
  out.note(fmt::format("S={:.2e} (limit {:.1e}) mu={:.2e} rad", c.s_bar, limit, c.mu_bar));
  out.fail_if(!(std::abs(c.s_bar) < limit), "mean sine too large");
  out.fail_if(!(std::abs(c.mu_bar) < 0.01), "mean direction too large");
  return out;
}

// --- 8 ------------------------------------------------------------------------
double grid_objective(const Eigen::MatrixXcd& h, double t1, double t2) {
  const std::complex<double> e1 = std::polar(1.0, t1), e2 = std::polar(1.0, t2);
  double s = 0.0;
  for (Eigen::Index r = 0; r < h.rows(); ++r) s += std::norm(h(r, 0) + h(r, 1) * e1 + h(r, 2) * e2);
  return s / 3.0;
}

double brute_force_egt(const Eigen::MatrixXcd& h) {
  const int m = 1440;  // 0.25 degree
  std::vector<std::complex<double>> ph(m);
  for (int i = 0; i < m; ++i) ph[i] = std::polar(1.0, -kPi + i * 2.0 * kPi / m);
  double best = -1.0;
  int bi = 0, bj = 0;
  const auto rows = h.rows();
  std::vector<std::complex<double>> a(static_cast<std::size_t>(rows));
  for (int i = 0; i < m; ++i) {
    for (Eigen::Index r = 0; r < rows; ++r) a[r] = h(r, 0) + h(r, 1) * ph[i];
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) s += std::norm(a[r] + h(r, 2) * ph[j]);
      if (s > best) {
        best = s;
        bi = i;
        bj = j;
      }
    }
  }
  double t1 = -kPi + bi * 2.0 * kPi / m, t2 = -kPi + bj * 2.0 * kPi / m;
  double f = grid_objective(h, t1, t2);
  for (double step = 2.0 * kPi / m; step > 1e-12;) {
    bool moved = false;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (!di && !dj) continue;
        const double v = grid_objective(h, t1 + di * step, t2 + dj * step);
        if (v > f) {
          f = v;
          t1 += di * step;
          t2 += dj * step;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return f;
}

Outcome egt_oracle(const AcceptanceOptions& o) {
  Outcome out;
  const int instances = 100;
  std::vector<double> rel(instances);
  std::vector<int> drops(instances, 0);
  parallel_for(instances, o.threads, [&](std::size_t i) {
    const auto state = init_channel(2, 3, substream_key(o.seed, 8, i));
    SteeringOptions so;
    so.record_trace = true;
    const auto sol = solve_steering(state.matrix, std::nullopt, so);
    for (std::size_t t = 1; t < sol.trace.size(); ++t)
      if (sol.trace[t] < sol.trace[t - 1]) ++drops[i];
    const double bf = brute_force_egt(state.matrix);
    rel[i] = std::abs(sol.objective - bf) / bf;
  });
  double worst = 0.0;
  int off = 0, down = 0;
  for (int i = 0; i < instances; ++i) {
    worst = std::max(worst, rel[i]);
    off += rel[i] >= 1e-6;
    down += drops[i];
  }
  out.note(fmt::format("worst relative gap {:.2e}; {} instances off; {} objective decreases", worst,
                       off, down));
  out.fail_if(off > 0, "coordinate ascent differs from the grid oracle");
  out.fail_if(down > 0, "objective decreased during ascent");
  return out;
}

// --- 9 ------------------------------------------------------------------------
Outcome vonmises_monotone(const AcceptanceOptions&) {
  Outcome out;
  int va = 0, vh = 0;
  double a_prev = specfun::mrl_of_kappa(0.0), h_prev = vonmises_entropy_from_kappa(0.0);
  for (int i = 1; i < 1000; ++i) {
    const double kappa = 100.0 * i / 999.0;
    const double a = specfun::mrl_of_kappa(kappa), h = vonmises_entropy_from_kappa(kappa);
    va += !(a > a_prev);
    vh += !(h < h_prev);
    a_prev = a;
    h_prev = h;
  }
  out.note(fmt::format("violations: A(kappa) {} entropy {}", va, vh));
  out.fail_if(va + vh > 0, "monotonicity violated");
  return out;
}

// --- 10 -----------------------------------------------------------------------
Outcome codebook_crossover(const AcceptanceOptions& o) {
  Outcome out;
  const double f_n = 0.01;
  SimulationSpec train;
  train.n_r = 2;
  train.n_t = 2;
  train.f_n = f_n;
  train.chains = 100;
  train.slots_per_chain = 1000;
  train.seed = substream_key(o.seed, 10, 0);
  train.threads = o.threads;
  const auto samples = simulate_phase_samples(train);
  const auto tracking = train_tracking_codebook(8, samples.eps, 2, 200, 1e-7, substream_key(o.seed, 10, 1), f_n);
  const auto steering = steering_codebook(2, 8);

  const int seeds = 20;
  std::vector<double> diff(seeds), st(seeds), tr(seeds);
  SnrOptions so;
  so.threads = o.threads;
  for (int s = 0; s < seeds; ++s) {
    const auto seed = substream_key(o.seed, 10, 100 + s);
    const auto a = evaluate_avg_snr(tracking, 2, 2, f_n, 100000, seed, so);
    const auto b = evaluate_avg_snr(steering, 2, 2, f_n, 100000, seed, so);
    tr[s] = a.mean_snr;
    st[s] = b.mean_snr;
    diff[s] = a.mean_snr - b.mean_snr;
  }
  const auto d = stats::mean_se(diff);
  out.note(fmt::format("tracking {:.4f} steering {:.4f} diff {:.4f} +- {:.4f} ({:.1f} SE)",
                       stats::mean_se(tr).mean, stats::mean_se(st).mean, d.mean, d.std_error,
                       d.mean / d.std_error));
  out.fail_if(!(d.mean > 3.0 * d.std_error), "tracking does not beat steering by 3 SE");
  return out;
}

// --- 11 -----------------------------------------------------------------------
Outcome planner_family(const AcceptanceOptions&) {
  Outcome out;
  const double eta = 0.25;
  double ref = std::nan("");
  double worst_scale = 0.0, worst_res = 0.0;
  for (double f_d : {10.0, 50.0, 100.0, 200.0}) {
    const auto p = solve_feedback_duration(eta, f_d, 2);
    const double prod = p.tau_hat * f_d;
    if (std::isnan(ref)) ref = prod;
    worst_scale = std::max(worst_scale, std::abs(prod - ref) / ref);
    worst_res = std::max({worst_res, p.entropy_residual, p.j0_residual});
  }
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string taus;
  for (double e : {0.1, 0.25, 0.5}) {
    const auto p = solve_feedback_duration(e, 50.0, 2);
    taus += fmt::format(" {:.4e}", p.tau_hat);
    decreasing = decreasing && p.tau_hat < prev;
    prev = p.tau_hat;
    worst_res = std::max({worst_res, p.entropy_residual, p.j0_residual});
  }
  out.note(fmt::format("1/f_D deviation {:.1e}; tau(eta=.1,.25,.5 @50Hz)={}; residual {:.1e}",
                       worst_scale, taus, worst_res));
  out.fail_if(!(worst_scale < 1e-9), "tau not proportional to 1/f_D");
  out.fail_if(!decreasing, "tau not strictly decreasing in eta");
  out.fail_if(!(worst_res < 1e-9), "root residual too large");
  return out;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  static const char* names[] = {"",
                                "steering entropy is uniform",
                                "tracking-entropy bounds dominate (N_R=2)",
                                "asymptotic tightness at f_N=0.5",
                                "slow-fading limit at f_N=0.001",
                                "FOG magnitude law (KS)",
                                "conditional-moment lemmas and c_i >= 0",
                                "circular symmetry of tracking values",
                                "coordinate ascent matches grid oracle",
                                "von Mises MRL/entropy monotone",
                                "tracking codebook beats steering at 3 bits",
                                "feedback duration planner",
                                "tracking-entropy bounds dominate (N_R=4)"};
  if (id < 1 || id > kCriterionCount) throw DomainError("run_criterion: id must be in 1..12");
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  switch (id) {
    case 1: o = steering_entropy(opts); break;
    case 2: o = bound_dominance(2, opts); break;
    case 3: o = asymptotic_tightness(opts); break;
    case 4: o = slow_fading(opts); break;
    case 5: o = fog_law(opts); break;
    case 6: o = lemma_dominance(opts); break;
    case 7: o = circular_symmetry(opts); break;
    case 8: o = egt_oracle(opts); break;
    case 9: o = vonmises_monotone(opts); break;
    case 10: o = codebook_crossover(opts); break;
    case 11: o = planner_family(opts); break;
    case 12: o = bound_dominance(4, opts); break;
  }
  CriterionResult r;
  r.id = id;
  r.name = names[id];
  r.passed = o.passed;
  r.detail = o.detail;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} C{:02d} {}: {} [{:.1f} s]", r.passed ? "PASS" : "FAIL", r.id, r.name,
                     r.detail, r.seconds);
}

}  // namespace fbtrack
