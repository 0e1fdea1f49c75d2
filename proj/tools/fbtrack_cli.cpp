// fbtrack command-line front end: figure data, bounds table, acceptance suite.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbtrack/acceptance.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/experiments.hpp"

namespace {

enum Exit { kOk = 0, kAcceptFailed = 1, kConfigError = 2, kNumericError = 3 };

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw fbtrack::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct Args {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<int> criteria;
};

fbtrack::Table run_accept(const fbtrack::ExperimentConfig& cfg, const std::vector<int>& ids,
                          bool& all_passed) {
  fbtrack::AcceptanceOptions o;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  fbtrack::Table t;
  t.columns = {"id", "name", "passed", "detail"};
  all_passed = true;
  nlohmann::json summary = nlohmann::json::array();
  for (int id : ids) {
    const auto r = fbtrack::run_criterion(id, o);
    std::cerr << fbtrack::format_result(r) << std::endl;
    all_passed = all_passed && r.passed;
    t.rows.push_back({std::to_string(r.id), csv_quote(r.name), r.passed ? "1" : "0",
                      csv_quote(r.detail)});
    summary.push_back({{"id", r.id}, {"passed", r.passed}});
  }
  nlohmann::json meta = {{"tool", "fbtrack"},
                         {"format", 1},
                         {"experiment", "accept"},
                         {"config", {{"seed", cfg.seed}}},
                         {"summary", summary}};
  t.meta_json = meta.dump();
  return t;
}

int run(fbtrack::Experiment e, const Args& a) {
  auto cfg = a.config.empty() ? fbtrack::default_config(e)
                              : fbtrack::config_from_json(e, read_file(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  fbtrack::validate(cfg);

  bool ok = true;
  fbtrack::Table t;
  switch (e) {
    case fbtrack::Experiment::fig2: t = fbtrack::run_fig2(cfg); break;
    case fbtrack::Experiment::fig3: t = fbtrack::run_fig3(cfg); break;
    case fbtrack::Experiment::fig4: t = fbtrack::run_fig4(cfg); break;
    case fbtrack::Experiment::fig5: t = fbtrack::run_fig5(cfg); break;
    case fbtrack::Experiment::bounds_table: t = fbtrack::run_bounds_table(cfg); break;
    case fbtrack::Experiment::accept: {
      std::vector<int> ids = a.criteria;
      if (ids.empty())
        for (int i = 1; i <= fbtrack::kCriterionCount; ++i) ids.push_back(i);
      t = run_accept(cfg, ids, ok);
      break;
    }
  }
  if (a.out.empty()) {
    fbtrack::write_csv(std::cout, t);
  } else {
    std::ofstream f(a.out);
    if (!f) throw fbtrack::ConfigError("cannot write output file '" + a.out + "'");
    fbtrack::write_csv(f, t);
  }
  return ok ? kOk : kAcceptFailed;
}

const char* describe(fbtrack::Experiment e) {
  switch (e) {
    case fbtrack::Experiment::fig2: return "joint histograms of steering and tracking values";
    case fbtrack::Experiment::fig3: return "conditional variance / mean resultant length vs gamma";
    case fbtrack::Experiment::fig4: return "tracking-value entropy estimates vs entropy bounds";
    case fbtrack::Experiment::fig5: return "codebook SNR and feedback-duration planning";
    case fbtrack::Experiment::accept: return "run the acceptance criteria";
    case fbtrack::Experiment::bounds_table: return "analytic bounds over an f_N grid";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fbtrack: feedback overhead of phase steering and phase tracking for EGT"};
  app.require_subcommand(1);
  Args args;
  std::vector<std::pair<CLI::App*, fbtrack::Experiment>> subs;
  for (auto e : {fbtrack::Experiment::fig2, fbtrack::Experiment::fig3, fbtrack::Experiment::fig4,
                 fbtrack::Experiment::fig5, fbtrack::Experiment::accept,
                 fbtrack::Experiment::bounds_table}) {
    auto* sub = app.add_subcommand(std::string(fbtrack::to_string(e)), describe(e));
    sub->add_option("--config", args.config, "JSON experiment configuration");
    sub->add_option("--out", args.out, "output CSV path (default: stdout)");
    sub->add_option("--seed", args.seed, "master seed (u64)");
    sub->add_option("--threads", args.threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    if (e == fbtrack::Experiment::accept)
      sub->add_option("--criterion", args.criteria, "run only these criteria (1-12)")
          ->check(CLI::Range(1, fbtrack::kCriterionCount));
    subs.emplace_back(sub, e);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  try {
    for (const auto& [sub, e] : subs)
      if (sub->parsed()) return run(e, args);
  } catch (const fbtrack::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const fbtrack::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::logic_error& e) {  // domain / capacity errors from bad parameters
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fbtrack::InfeasibleError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
  return kConfigError;
}
