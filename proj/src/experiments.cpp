#include "fbtrack/experiments.hpp"

#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <set>

#include "json.hpp"

#include "fbtrack/channel.hpp"
#include "fbtrack/codebook.hpp"
#include "fbtrack/egt.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/parallel.hpp"
#include "fbtrack/planner.hpp"
#include "fbtrack/rng.hpp"
#include "fbtrack/stats.hpp"

namespace fbtrack {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr int kOutputFormat = 1;

std::string_view alignment_name(BinAlignment a) { return a == BinAlignment::edge ? "edge" : "centered"; }

BinAlignment parse_alignment(const std::string& s) {
  if (s == "edge") return BinAlignment::edge;
  if (s == "centered") return BinAlignment::centered;
  throw ConfigError("alignment must be 'edge' or 'centered', got '" + s + "'");
}

std::string meta_line(const ExperimentConfig& cfg, json summary) {
  json m;
  m["tool"] = "fbtrack";
  m["format"] = kOutputFormat;
  m["experiment"] = std::string(to_string(cfg.experiment));
  m["config"] = json::parse(config_to_json(cfg));
  m["units"] = {{"angle", "rad"}, {"entropy", "bit"}, {"snr", "linear"}};
  m["summary"] = std::move(summary);
  return m.dump();
}

double cell_centre(int i, int levels, BinAlignment a) {
  const double d = 2.0 * kPi / levels;
  return -kPi + (a == BinAlignment::centered ? i * d : (i + 0.5) * d);
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::fig2: return "fig2";
    case Experiment::fig3: return "fig3";
    case Experiment::fig4: return "fig4";
    case Experiment::fig5: return "fig5";
    case Experiment::bounds_table: return "bounds-table";
    case Experiment::accept: return "accept";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::fig2, Experiment::fig3, Experiment::fig4, Experiment::fig5,
                 Experiment::bounds_table, Experiment::accept})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::fig2:
      c.n_t = 3;
      c.f_n_grid = {0.1};
      break;
    case Experiment::fig3:
      c.gamma_grid = {0.0,  0.1,  0.2,  0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0,
                      1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0};
      break;
    case Experiment::fig4:
      c.f_n_grid = {0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
      break;
    case Experiment::fig5:
      c.f_n_grid = {0.01, 0.05, 0.1, 0.3};
      break;
    case Experiment::bounds_table:
      c.f_n_grid = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5};
      break;
    case Experiment::accept:
      break;
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (c.n_r < 1 || c.n_r > 64) fail("n_r must be in [1, 64]");
  if (c.n_t < 2 || c.n_t > 16) fail("n_t must be in [2, 16]");
  if (c.experiment == Experiment::fig2 && c.n_t != 3) fail("fig2 histograms need n_t = 3");
  for (double f : c.f_n_grid)
    if (!(f >= 0.0 && f <= 10.0)) fail("f_n_grid entries must lie in [0, 10]");
  if (c.levels < 2 || c.levels > 4096) fail("levels must be in [2, 4096]");
  for (int l : c.entropy_levels)
    if (l < 2 || l > 4096) fail("entropy_levels entries must be in [2, 4096]");
  if (c.chains < 1) fail("chains must be positive");
  if (c.slots_per_chain < 2) fail("slots_per_chain must be at least 2");
  if (c.hist_bins < 2 || c.hist_bins > 1024) fail("hist_bins must be in [2, 1024]");
  for (double g : c.gamma_grid)
    if (!(g >= 0.0) || !std::isfinite(g)) fail("gamma_grid entries must be finite and >= 0");
  if (c.mc_samples < 2) fail("mc_samples must be at least 2");
  if (c.snr_chains < 1) fail("snr_chains must be positive");
  if (c.snr_slots < static_cast<std::size_t>(c.snr_chains)) fail("snr_slots must be >= snr_chains");
  for (int b : c.codebook_bits)
    if (b < 1 || b > 12) fail("codebook_bits entries must be in [1, 12]");
  if (c.training_slots < 200) fail("training_slots must be at least 200");
  if (c.lloyd_max_iter < 1) fail("lloyd_max_iter must be positive");
  if (!(c.lloyd_tol >= 0.0)) fail("lloyd_tol must be non-negative");
  for (double e : c.eta_grid)
    if (!(e > 0.0 && e < 1.0)) fail("eta_grid entries must lie in (0, 1)");
  for (double f : c.f_d_grid)
    if (!(f > 0.0) || !std::isfinite(f)) fail("f_d_grid entries must be positive");
  if (c.panel != "a" && c.panel != "b" && c.panel != "both") fail("panel must be a, b or both");
  if (!(c.quad_tol >= 1e-14 && c.quad_tol <= 1e-3)) fail("quad_tol must be in [1e-14, 1e-3]");
  if (c.threads < 0) fail("threads must be non-negative");
}

ExperimentConfig config_from_json(Experiment e, const std::string& text) {
  ExperimentConfig c = default_config(e);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config: invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> known = {
      "experiment",  "n_r",           "n_t",        "f_n_grid",      "levels",
      "entropy_levels", "chains",     "slots_per_chain", "hist_bins", "gamma_grid",
      "mc_samples",  "snr_slots",     "snr_chains", "codebook_bits", "training_slots",
      "lloyd_max_iter", "lloyd_tol",  "eta_grid",   "f_d_grid",      "panel",
      "warm_start",  "bound_kind",    "alignment",  "quad_tol",      "seed",
      "threads"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  try {
    if (j.contains("experiment") && parse_experiment(j["experiment"].get<std::string>()) != e)
      throw ConfigError("config: experiment '" + j["experiment"].get<std::string>() +
                        "' does not match the subcommand");
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("n_r", c.n_r);
    get("n_t", c.n_t);
    get("f_n_grid", c.f_n_grid);
    get("levels", c.levels);
    get("entropy_levels", c.entropy_levels);
    get("chains", c.chains);
    get("slots_per_chain", c.slots_per_chain);
    get("hist_bins", c.hist_bins);
    get("gamma_grid", c.gamma_grid);
    get("mc_samples", c.mc_samples);
    get("snr_slots", c.snr_slots);
    get("snr_chains", c.snr_chains);
    get("codebook_bits", c.codebook_bits);
    get("training_slots", c.training_slots);
    get("lloyd_max_iter", c.lloyd_max_iter);
    get("lloyd_tol", c.lloyd_tol);
    get("eta_grid", c.eta_grid);
    get("f_d_grid", c.f_d_grid);
    get("panel", c.panel);
    get("warm_start", c.warm_start);
    get("quad_tol", c.quad_tol);
    get("seed", c.seed);
    get("threads", c.threads);
    if (j.contains("bound_kind")) c.bound_kind = parse_bound_kind(j["bound_kind"].get<std::string>());
    if (j.contains("alignment")) c.alignment = parse_alignment(j["alignment"].get<std::string>());
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["n_r"] = c.n_r;
  j["n_t"] = c.n_t;
  j["f_n_grid"] = c.f_n_grid;
  j["levels"] = c.levels;
  j["entropy_levels"] = c.entropy_levels;
  j["chains"] = c.chains;
  j["slots_per_chain"] = c.slots_per_chain;
  j["hist_bins"] = c.hist_bins;
  j["gamma_grid"] = c.gamma_grid;
  j["mc_samples"] = c.mc_samples;
  j["snr_slots"] = c.snr_slots;
  j["snr_chains"] = c.snr_chains;
  j["codebook_bits"] = c.codebook_bits;
  j["training_slots"] = c.training_slots;
  j["lloyd_max_iter"] = c.lloyd_max_iter;
  j["lloyd_tol"] = c.lloyd_tol;
  j["eta_grid"] = c.eta_grid;
  j["f_d_grid"] = c.f_d_grid;
  j["panel"] = c.panel;
  j["warm_start"] = c.warm_start;
  j["bound_kind"] = std::string(to_string(c.bound_kind));
  j["alignment"] = std::string(alignment_name(c.alignment));
  j["quad_tol"] = c.quad_tol;
  j["seed"] = c.seed;
  return j.dump();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.12g}", v);
}

void write_csv(std::ostream& os, const Table& t) {
  os << "# " << t.meta_json << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

PhaseSamples simulate_phase_samples(const SimulationSpec& s) {
  if (s.chains < 1 || s.slots_per_chain < 2)
    throw DomainError("simulate_phase_samples: need at least one chain of two slots");
  const auto params = params_from_fn(s.f_n);
  const auto d = static_cast<std::size_t>(s.n_t - 1);
  PhaseSamples out;
  out.dimension = s.n_t - 1;
  out.chains = s.chains;
  out.slots_per_chain = s.slots_per_chain;
  out.theta.resize(s.chains * s.slots_per_chain * d);
  out.eps.resize(s.chains * (s.slots_per_chain - 1) * d);
  std::vector<std::size_t> misses(s.chains, 0);
  parallel_for(s.chains, s.threads, [&](std::size_t c) {
    ChannelSequence seq(s.n_r, s.n_t, params, s.seed, c);
    PhaseTracker tracker(s.warm_start);
    double* th = out.theta.data() + c * s.slots_per_chain * d;
    double* ep = out.eps.data() + c * (s.slots_per_chain - 1) * d;
    for (std::size_t n = 0; n < s.slots_per_chain; ++n) {
      if (n > 0) seq.step();
      const auto step = tracker.next(seq.state());
      if (!step.converged) ++misses[c];
      std::copy(step.theta.angles.begin(), step.theta.angles.end(), th + n * d);
      if (step.epsilon)
        std::copy(step.epsilon->angles.begin(), step.epsilon->angles.end(), ep + (n - 1) * d);
    }
  });
  for (auto m : misses) out.unconverged += m;
  return out;
}

std::vector<double> coordinate(const std::vector<double>& flat, int dimension, int coord) {
  const auto d = static_cast<std::size_t>(dimension);
  std::vector<double> out;
  out.reserve(flat.size() / d);
  for (std::size_t i = static_cast<std::size_t>(coord); i < flat.size(); i += d) out.push_back(flat[i]);
  return out;
}

namespace {

SimulationSpec sim_spec(const ExperimentConfig& c, double f_n, std::uint64_t seed) {
  SimulationSpec s;
  s.n_r = c.n_r;
  s.n_t = c.n_t;
  s.f_n = f_n;
  s.chains = c.chains;
  s.slots_per_chain = c.slots_per_chain;
  s.seed = seed;
  s.threads = c.threads;
  s.warm_start = c.warm_start;
  return s;
}

}  // namespace

Table run_fig2(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.columns = {"kind", "f_n", "i", "j", "center_1", "center_2", "count"};
  json summary = json::array();
  const int b = c.hist_bins;
  for (std::size_t g = 0; g < c.f_n_grid.size(); ++g) {
    const double f_n = c.f_n_grid[g];
    const auto s = simulate_phase_samples(sim_spec(c, f_n, substream_key(c.seed, 2, g)));
    // The chi-square test needs independent draws: keep every m-th slot, |rho|^m < 0.01.
    const double r = std::abs(params_from_fn(f_n).rho);
    const std::size_t thin =
        r >= 1.0 ? c.slots_per_chain
                 : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(0.01) / std::log(r))));
    for (const auto* kind : {"steering", "tracking"}) {
      const bool steering = std::string(kind) == "steering";
      const auto& flat = steering ? s.theta : s.eps;
      const std::size_t per_chain = steering ? c.slots_per_chain : c.slots_per_chain - 1;
      std::vector<std::uint64_t> thinned(static_cast<std::size_t>(b) * b, 0);
      std::vector<std::uint64_t> counts(static_cast<std::size_t>(b) * b, 0);
      for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
        const auto q1 = quantize_angle(flat[i], b, c.alignment);
        const auto q2 = quantize_angle(flat[i + 1], b, c.alignment);
        ++counts[q1 * static_cast<std::size_t>(b) + q2];
        if ((i / 2) % per_chain % thin == 0) ++thinned[q1 * static_cast<std::size_t>(b) + q2];
      }
      std::uint64_t total = 0;
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
          const auto n = counts[static_cast<std::size_t>(i) * b + j];
          total += n;
          t.rows.push_back({kind, format_number(f_n), std::to_string(i), std::to_string(j),
                            format_number(cell_centre(i, b, c.alignment)),
                            format_number(cell_centre(j, b, c.alignment)), std::to_string(n)});
        }
      const auto chi = stats::chi_square_uniform(thinned);
      const auto peak = *std::max_element(counts.begin(), counts.end());
      summary.push_back({{"kind", kind},
                         {"f_n", f_n},
                         {"total", total},
                         {"chi_square", chi.statistic},
                         {"chi_square_p", chi.p_value},
                         {"chi_square_thinning", thin},
                         {"peak_to_mean", static_cast<double>(peak) * counts.size() / total}});
    }
  }
  t.meta_json = meta_line(c, summary);
  return t;
}

Table run_fig3(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.columns = {"gamma",      "mc_var",       "mc_var_se",     "exact_var", "var_upper",
               "cbar_exact", "cbar_elliptic", "cbar_lower"};
  std::vector<std::vector<std::string>> rows(c.gamma_grid.size());
  parallel_for(c.gamma_grid.size(), c.threads, [&](std::size_t i) {
    const double g = c.gamma_grid[i];
    CounterRng rng(substream_key(c.seed, 3, i));
    std::vector<double> sq(c.mc_samples);
    for (auto& v : sq) {
      const double e = eps_given_fog(g, -kPi + 2.0 * kPi * rng.uniform());
      v = e * e;
    }
    const auto ms = stats::mean_se(sq);
    const double ell = g == 1.0 ? std::nan("") : cbar_eps_elliptic(g);
    rows[i] = {format_number(g),
               format_number(ms.mean),
               format_number(ms.std_error),
               format_number(cond_var_exact(g)),
               format_number(cond_var_upper(g)),
               format_number(cbar_eps_given_gamma(g)),
               format_number(ell),
               format_number(cbar_lower(g))};
  });
  t.rows = std::move(rows);
  t.meta_json = meta_line(c, json::object());
  return t;
}

Table run_fig4(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.columns = {"f_n", "rho", "k", "h_theta", "h_theta_se", fmt::format("H_theta_L{}", c.levels),
               "h_eps", "h_eps_se"};
  for (int l : c.entropy_levels) {
    t.columns.push_back(fmt::format("H_eps_L{}", l));
    t.columns.push_back(fmt::format("H_eps_L{}_se", l));
  }
  for (auto k : {BoundKind::gaussian_numeric, BoundKind::gaussian_closed,
                 BoundKind::vonmises_numeric, BoundKind::vonmises_closed})
    t.columns.push_back("bound_" + std::string(to_string(k)));
  t.columns.push_back(fmt::format("H_gaussian_closed_L{}", c.levels));
  t.columns.push_back(fmt::format("H_vonmises_closed_L{}", c.levels));
  t.columns.push_back(fmt::format("Hq_gaussian_closed_L{}", c.levels));
  t.columns.push_back(fmt::format("Hq_vonmises_closed_L{}", c.levels));

  const int d = c.n_t - 1;
  json summary = json::array();
  for (std::size_t g = 0; g < c.f_n_grid.size(); ++g) {
    const double f_n = c.f_n_grid[g];
    const auto p = params_from_fn(f_n);
    const auto s = simulate_phase_samples(sim_spec(c, f_n, substream_key(c.seed, 4, g)));
    const int batches = static_cast<int>(std::min<std::size_t>(100, c.chains));
    const auto th = joint_discrete_entropy(s.theta, d, c.levels, c.alignment, batches);
    const auto ep = joint_discrete_entropy(s.eps, d, c.levels, c.alignment, batches);
    std::vector<std::string> row = {format_number(f_n),
                                    format_number(p.rho),
                                    format_number(p.k),
                                    format_number(th.continuous_bits / d),
                                    format_number(th.std_error / d),
                                    format_number(th.discrete_bits / d),
                                    format_number(ep.continuous_bits / d),
                                    format_number(ep.std_error / d)};
    for (int l : c.entropy_levels) {
      const auto e = joint_discrete_entropy(s.eps, d, l, c.alignment, batches);
      row.push_back(format_number(e.discrete_bits / d));
      row.push_back(format_number(e.std_error / d));
    }
    if (std::isinf(p.k)) {
      for (int i = 0; i < 8; ++i) row.emplace_back();
    } else {
      const auto suite = bound_suite(p.k, c.quad_tol);
      for (const auto& b : suite) row.push_back(format_number(b.value_bits));
      row.push_back(format_number(discrete_bound_bits(suite[1].value_bits, c.levels)));
      row.push_back(format_number(discrete_bound_bits(suite[3].value_bits, c.levels)));
      row.push_back(format_number(quantized_bound_bits(suite[1], c.levels, c.alignment)));
      row.push_back(format_number(quantized_bound_bits(suite[3], c.levels, c.alignment)));
    }
    t.rows.push_back(std::move(row));
    summary.push_back({{"f_n", f_n}, {"unconverged_solves", s.unconverged}});
  }
  t.meta_json = meta_line(c, summary);
  return t;
}

Table run_fig5(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.columns = {"panel", "kind",  "f_n",     "bits",    "avg_snr", "snr_se", "ref_snr",
               "ref_se", "eta",  "f_d",     "f_n_hat", "rho_hat", "tau_hat"};
  const int d = c.n_t - 1;
  auto blank_row = [&] { return std::vector<std::string>(t.columns.size()); };
  if (c.panel != "b") {
    for (std::size_t g = 0; g < c.f_n_grid.size(); ++g) {
      const double f_n = c.f_n_grid[g];
      auto train = sim_spec(c, f_n, substream_key(c.seed, 51, g));
      train.chains = 100;
      train.slots_per_chain = std::max<std::size_t>(2, c.training_slots / 100);
      const auto samples = simulate_phase_samples(train);
      SnrOptions so;
      so.chains = c.snr_chains;
      so.threads = c.threads;
      const auto eval_seed = substream_key(c.seed, 52, g);
      for (int bits : c.codebook_bits) {
        std::vector<std::pair<std::string, Codebook>> books;
        if (bits % d == 0) books.emplace_back("steering", steering_codebook(c.n_t, 1 << (bits / d)));
        books.emplace_back("tracking", train_tracking_codebook(1 << bits, samples.eps, c.n_t,
                                                               c.lloyd_max_iter, c.lloyd_tol,
                                                               substream_key(c.seed, 53, g), f_n));
        for (const auto& [kind, cb] : books) {
          const auto r = evaluate_avg_snr(cb, c.n_r, c.n_t, f_n, c.snr_slots, eval_seed, so);
          auto row = blank_row();
          row[0] = "a";
          row[1] = kind;
          row[2] = format_number(f_n);
          row[3] = std::to_string(bits);
          row[4] = format_number(r.mean_snr);
          row[5] = format_number(r.std_error);
          row[6] = format_number(r.reference_snr);
          row[7] = format_number(r.reference_std_error);
          t.rows.push_back(std::move(row));
        }
      }
    }
  }
  if (c.panel != "a") {
    for (double eta : c.eta_grid)
      for (double f_d : c.f_d_grid) {
        const auto p = solve_feedback_duration(eta, f_d, c.n_t, c.bound_kind);
        auto row = blank_row();
        row[0] = "b";
        row[1] = "planner";
        row[8] = format_number(eta);
        row[9] = format_number(f_d);
        row[10] = format_number(p.f_n_hat);
        row[11] = format_number(p.rho_hat);
        row[12] = format_number(p.tau_hat);
        t.rows.push_back(std::move(row));
      }
  }
  t.meta_json = meta_line(c, json::object());
  return t;
}

Table run_bounds_table(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.columns = {"f_n",      "rho",      "k",         "sigma_eps_sq",     "sigma_u_sq",
               "rbar_eps", "rbar_L",   "c1",        "c2",               "h_gaussian_numeric",
               "h_gaussian_closed",    "h_vonmises_numeric", "h_vonmises_closed",
               fmt::format("H_gaussian_closed_L{}", c.levels),
               fmt::format("H_vonmises_closed_L{}", c.levels),
               fmt::format("Hq_gaussian_closed_L{}", c.levels),
               fmt::format("Hq_vonmises_closed_L{}", c.levels)};
  std::vector<std::vector<std::string>> rows(c.f_n_grid.size());
  parallel_for(c.f_n_grid.size(), c.threads, [&](std::size_t i) {
    const double f_n = c.f_n_grid[i];
    const auto p = params_from_fn(f_n);
    std::vector<std::string> row = {format_number(f_n), format_number(p.rho), format_number(p.k)};
    if (std::isinf(p.k)) {
      row.resize(t.columns.size());
    } else {
      const auto s = bound_suite(p.k, c.quad_tol);
      for (double v : {s[0].intermediate, s[1].intermediate, s[2].intermediate, s[3].intermediate,
                       c1_of_k(p.k), c2_of_k(p.k), s[0].value_bits, s[1].value_bits,
                       s[2].value_bits, s[3].value_bits,
                       discrete_bound_bits(s[1].value_bits, c.levels),
                       discrete_bound_bits(s[3].value_bits, c.levels),
                       quantized_bound_bits(s[1], c.levels, c.alignment),
                       quantized_bound_bits(s[3], c.levels, c.alignment)})
        row.push_back(format_number(v));
    }
    rows[i] = std::move(row);
  });
  t.rows = std::move(rows);
  json summary;
  const auto gaps = asymptotic_gaps();
  summary["asymptotic_gap_gaussian_closed"] = gaps.gaussian_gap_bits;
  summary["asymptotic_gap_vonmises_closed"] = gaps.vonmises_gap_bits;
  t.meta_json = meta_line(c, summary);
  return t;
}

}  // namespace fbtrack
