#include "fbtrack/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "fbtrack/channel.hpp"
#include "fbtrack/egt.hpp"
#include "fbtrack/errors.hpp"
#include "fbtrack/parallel.hpp"
#include "fbtrack/rng.hpp"
#include "fbtrack/stats.hpp"

namespace fbtrack {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFormatVersion = 1;

std::size_t grid_size(int n_t, int levels) {
  std::size_t n = 1;
  for (int i = 1; i < n_t; ++i) {
    n *= static_cast<std::size_t>(levels);
    if (n > kMaxCodebookSearch) return kMaxCodebookSearch + 1;
  }
  return n;
}

std::size_t nearest(const Codebook& cb, std::span<const double> x, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cb.size(); ++j) {
    const double d = wrapped_distortion(x, cb.entry(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

struct Pick {
  std::size_t index = 0;
  double snr = -1.0;
};

// Exhaustive max-SNR over the codebook; `offset` (tracking) is added to each codeword.
Pick best_codeword(const Eigen::MatrixXcd& h, const Codebook& cb, std::span<const double> offset,
                   std::vector<double>& scratch) {
  const auto d = static_cast<std::size_t>(cb.dimension());
  scratch.resize(d);
  Pick best;
  for (std::size_t j = 0; j < cb.size(); ++j) {
    const auto c = cb.entry(j);
    for (std::size_t i = 0; i < d; ++i) scratch[i] = offset.empty() ? c[i] : wrap_angle(offset[i] + c[i]);
    const double snr = egt_objective(h, scratch);
    if (snr > best.snr) best = {j, snr};
  }
  return best;
}

}  // namespace

Codebook steering_codebook(int n_t, int levels) {
  if (n_t < 2) throw DomainError("steering_codebook: n_t must be at least 2");
  if (levels < 2) throw DomainError("steering_codebook: need at least 2 levels");
  const std::size_t count = grid_size(n_t, levels);
  if (count > kMaxCodebookSearch)
    throw CapacityError("steering_codebook: L^(n_t-1) exceeds 2^20 entries");
  Codebook cb;
  cb.kind = CodebookKind::steering;
  cb.n_t = n_t;
  cb.bits = (n_t - 1) * std::log2(static_cast<double>(levels));
  cb.metadata.levels = levels;
  const auto d = static_cast<std::size_t>(n_t - 1);
  const double step = 2.0 * kPi / levels;
  cb.entries.resize(count * d);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    for (std::size_t c = d; c-- > 0;) {
      const auto digit = static_cast<double>(rest % static_cast<std::size_t>(levels));
      rest /= static_cast<std::size_t>(levels);
      cb.entries[i * d + c] = -kPi + (digit + 0.5) * step;
    }
  }
  return cb;
}

double wrapped_distortion(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = wrap_angle(a[i] - b[i]);
    s += e * e;
  }
  return s;
}

double codebook_distortion(const Codebook& cb, std::span<const double> samples) {
  const auto d = static_cast<std::size_t>(cb.dimension());
  if (samples.empty() || samples.size() % d != 0)
    throw DomainError("codebook_distortion: sample size is not a multiple of n_t - 1");
  const std::size_t n = samples.size() / d;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dist = 0.0;
    nearest(cb, samples.subspan(i * d, d), &dist);
    total += dist;
  }
  return total / static_cast<double>(n);
}

Codebook train_tracking_codebook(int codewords, std::span<const double> samples, int n_t,
                                 int max_iter, double tol, std::uint64_t seed,
                                 std::optional<double> training_f_n) {
  if (codewords < 2) throw DomainError("train_tracking_codebook: T must be at least 2");
  if (n_t < 2) throw DomainError("train_tracking_codebook: n_t must be at least 2");
  if (max_iter < 1) throw DomainError("train_tracking_codebook: max_iter must be positive");
  const auto d = static_cast<std::size_t>(n_t - 1);
  if (samples.size() % d != 0)
    throw DomainError("train_tracking_codebook: sample size is not a multiple of n_t - 1");
  const std::size_t n = samples.size() / d;
  const auto t = static_cast<std::size_t>(codewords);
  if (n < 100 * t)
    throw DomainError("train_tracking_codebook: need at least 100 T training vectors, got " +
                      std::to_string(n));

  Codebook cb;
  cb.kind = CodebookKind::tracking;
  cb.n_t = n_t;
  cb.bits = std::log2(static_cast<double>(codewords));
  cb.metadata.f_n = training_f_n;
  cb.metadata.seed = seed;
  cb.entries.resize(t * d);

  // Initial codewords: T distinct sample indices (partial Fisher-Yates).
  CounterRng rng(substream_key(seed, 0x11));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t j = 0; j < t; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - j));
    std::swap(order[j], order[std::min(r, n - 1)]);
    for (std::size_t c = 0; c < d; ++c) cb.entries[j * d + c] = wrap_angle(samples[order[j] * d + c]);
  }

  std::vector<std::size_t> assign(n);
  std::vector<double> dist(n);
  auto assign_all = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = nearest(cb, samples.subspan(i * d, d), &dist[i]);
      total += dist[i];
    }
    return total / static_cast<double>(n);
  };

  double current = assign_all();
  cb.metadata.distortion_history.push_back(current);
  int it = 0;
  while (it < max_iter && current > 0.0) {
    ++it;
    // Centroid step: circular mean per coordinate, kept only if it helps.
    std::vector<double> sum_c(t * d, 0.0), sum_s(t * d, 0.0), cell_cost(t, 0.0);
    std::vector<std::size_t> members(t, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = assign[i];
      ++members[j];
      cell_cost[j] += dist[i];
      for (std::size_t c = 0; c < d; ++c) {
        sum_c[j * d + c] += std::cos(samples[i * d + c]);
        sum_s[j * d + c] += std::sin(samples[i * d + c]);
      }
    }
    std::vector<double> old_cost(t * d, 0.0), new_cost(t * d, 0.0), proposal(t * d);
    for (std::size_t k = 0; k < t * d; ++k)
      proposal[k] = (sum_c[k] == 0.0 && sum_s[k] == 0.0) ? cb.entries[k]
                                                         : wrap_angle(std::atan2(sum_s[k], sum_c[k]));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = assign[i];
      for (std::size_t c = 0; c < d; ++c) {
        const double x = samples[i * d + c];
        const double eo = wrap_angle(x - cb.entries[j * d + c]);
        const double en = wrap_angle(x - proposal[j * d + c]);
        old_cost[j * d + c] += eo * eo;
        new_cost[j * d + c] += en * en;
      }
    }
    for (std::size_t k = 0; k < t * d; ++k)
      if (new_cost[k] < old_cost[k]) cb.entries[k] = proposal[k];

    // Empty cells: split the highest-distortion cell at its worst-fit sample.
    for (std::size_t j = 0; j < t; ++j) {
      if (members[j] > 0) continue;
      const auto worst_cell = static_cast<std::size_t>(
          std::max_element(cell_cost.begin(), cell_cost.end()) - cell_cost.begin());
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == worst_cell && (worst == n || dist[i] > dist[worst])) worst = i;
      if (worst == n || dist[worst] == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) cb.entries[j * d + c] = wrap_angle(samples[worst * d + c]);
      cell_cost[worst_cell] -= dist[worst];
      dist[worst] = 0.0;
      assign[worst] = j;
      members[j] = 1;
    }

    const double next = assign_all();
    cb.metadata.distortion_history.push_back(next);
    const double change = (current - next) / current;
    current = next;
    if (change < tol) break;
  }
  cb.metadata.iterations = it;
  return cb;
}

SnrResult evaluate_avg_snr(const Codebook& cb, int n_r, int n_t, double f_n, std::size_t n_slots,
                           std::uint64_t seed, const SnrOptions& opts) {
  if (cb.n_t != n_t) throw DomainError("evaluate_avg_snr: codebook n_t does not match the channel");
  if (n_r < 1) throw DomainError("evaluate_avg_snr: n_r must be positive");
  if (opts.chains < 1) throw DomainError("evaluate_avg_snr: need at least one chain");
  if (n_slots < static_cast<std::size_t>(opts.chains))
    throw DomainError("evaluate_avg_snr: fewer slots than chains");
  if (cb.size() > kMaxCodebookSearch) throw CapacityError("evaluate_avg_snr: codebook exceeds 2^20");
  const bool tracking = cb.kind == CodebookKind::tracking;
  std::optional<Codebook> acquisition;
  if (tracking) acquisition = steering_codebook(n_t, opts.acquisition_levels);

  const auto params = params_from_fn(f_n);
  const auto chains = static_cast<std::size_t>(opts.chains);
  const auto d = static_cast<std::size_t>(n_t - 1);
  std::vector<std::vector<double>> snr(chains), ref(chains);
  std::vector<SelectionLog> logs(chains);

  parallel_for(chains, opts.threads, [&](std::size_t c) {
    const std::size_t lo = n_slots * c / chains, hi = n_slots * (c + 1) / chains;
    ChannelSequence seq(n_r, n_t, params, seed, c);
    PhaseTracker tracker(true);
    std::vector<double> scratch, prev;
    auto& log = logs[c];
    auto& s = snr[c];
    auto& r = ref[c];
    s.reserve(hi - lo);
    r.reserve(hi - lo);
    for (std::size_t slot = lo; slot < hi; ++slot) {
      if (slot > lo) seq.step();
      const auto& h = seq.state().matrix;
      Pick pick;
      std::span<const double> chosen;
      if (tracking && slot == lo) {
        pick = best_codeword(h, *acquisition, {}, scratch);
        log.acquisition_index = static_cast<std::uint32_t>(pick.index);
        const auto e = acquisition->entry(pick.index);
        prev.assign(e.begin(), e.end());
      } else if (tracking) {
        pick = best_codeword(h, cb, prev, scratch);
        log.indices.push_back(static_cast<std::uint32_t>(pick.index));
        const auto e = cb.entry(pick.index);
        for (std::size_t i = 0; i < d; ++i) prev[i] = wrap_angle(prev[i] + e[i]);
      } else {
        pick = best_codeword(h, cb, {}, scratch);
        log.indices.push_back(static_cast<std::uint32_t>(pick.index));
        const auto e = cb.entry(pick.index);
        prev.assign(e.begin(), e.end());
      }
      if (opts.keep_logs) log.reconstructions.insert(log.reconstructions.end(), prev.begin(), prev.end());
      s.push_back(pick.snr);
      const auto step = tracker.next(seq.state());
      r.push_back(egt_objective(h, step.theta.angles));
    }
    if (!opts.keep_logs) log = SelectionLog{};
  });

  std::vector<double> all_s, all_r;
  all_s.reserve(n_slots);
  all_r.reserve(n_slots);
  for (std::size_t c = 0; c < chains; ++c) {
    all_s.insert(all_s.end(), snr[c].begin(), snr[c].end());
    all_r.insert(all_r.end(), ref[c].begin(), ref[c].end());
  }
  const auto ms = stats::batch_mean_se(all_s, opts.batches);
  const auto mr = stats::batch_mean_se(all_r, opts.batches);
  SnrResult out;
  out.mean_snr = ms.mean;
  out.std_error = ms.std_error;
  out.reference_snr = mr.mean;
  out.reference_std_error = mr.std_error;
  out.slots = n_slots;
  if (opts.keep_logs) out.logs = std::move(logs);
  return out;
}

std::vector<double> replay_selections(const Codebook& cb, const SelectionLog& log,
                                      int acquisition_levels) {
  const auto d = static_cast<std::size_t>(cb.dimension());
  std::vector<double> out;
  std::vector<double> prev;
  if (cb.kind == CodebookKind::tracking) {
    const auto acq = steering_codebook(cb.n_t, acquisition_levels);
    if (log.acquisition_index >= acq.size()) throw DomainError("replay_selections: bad acquisition index");
    const auto e = acq.entry(log.acquisition_index);
    prev.assign(e.begin(), e.end());
    out.insert(out.end(), prev.begin(), prev.end());
  }
  for (auto idx : log.indices) {
    if (idx >= cb.size()) throw DomainError("replay_selections: codeword index out of range");
    const auto e = cb.entry(idx);
    if (cb.kind == CodebookKind::tracking) {
      for (std::size_t i = 0; i < d; ++i) prev[i] = wrap_angle(prev[i] + e[i]);
    } else {
      prev.assign(e.begin(), e.end());
    }
    out.insert(out.end(), prev.begin(), prev.end());
  }
  return out;
}

std::string codebook_to_json(const Codebook& cb) {
  nlohmann::json j;
  j["format"] = "fbtrack-codebook";
  j["version"] = kFormatVersion;
  j["kind"] = cb.kind == CodebookKind::steering ? "steering" : "tracking";
  j["n_t"] = cb.n_t;
  j["bits"] = cb.bits;
  auto& e = j["entries"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto v = cb.entry(i);
    e.push_back(std::vector<double>(v.begin(), v.end()));
  }
  auto& m = j["metadata"];
  m["f_n"] = cb.metadata.f_n ? nlohmann::json(*cb.metadata.f_n) : nlohmann::json(nullptr);
  m["levels"] = cb.metadata.levels;
  m["seed"] = cb.metadata.seed;
  m["iterations"] = cb.metadata.iterations;
  m["distortion_history"] = cb.metadata.distortion_history;
  return j.dump(1);
}

Codebook codebook_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "fbtrack-codebook")
      throw ConfigError("codebook: not an fbtrack codebook file");
    if (j.at("version").get<int>() != kFormatVersion)
      throw ConfigError("codebook: unsupported format version");
    Codebook cb;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "steering") cb.kind = CodebookKind::steering;
    else if (kind == "tracking") cb.kind = CodebookKind::tracking;
    else throw ConfigError("codebook: unknown kind '" + kind + "'");
    cb.n_t = j.at("n_t").get<int>();
    if (cb.n_t < 2) throw ConfigError("codebook: n_t must be at least 2");
    cb.bits = j.at("bits").get<double>();
    for (const auto& row : j.at("entries")) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != static_cast<std::size_t>(cb.n_t - 1))
        throw ConfigError("codebook: entry length does not match n_t - 1");
      cb.entries.insert(cb.entries.end(), v.begin(), v.end());
    }
    const auto& m = j.at("metadata");
    if (!m.at("f_n").is_null()) cb.metadata.f_n = m.at("f_n").get<double>();
    cb.metadata.levels = m.at("levels").get<int>();
    cb.metadata.seed = m.at("seed").get<std::uint64_t>();
    cb.metadata.iterations = m.at("iterations").get<int>();
    cb.metadata.distortion_history = m.at("distortion_history").get<std::vector<double>>();
    return cb;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("codebook: malformed JSON: ") + e.what());
  }
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write codebook file '" + path + "'");
  f << codebook_to_json(cb) << '\n';
}

Codebook load_codebook(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read codebook file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return codebook_from_json(ss.str());
}

}  // namespace fbtrack
