#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbtrack/bounds.hpp"
#include "fbtrack/circstats.hpp"

namespace fbtrack {

enum class Experiment { fig2, fig3, fig4, fig5, bounds_table, accept };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Everything a run depends on. Validated before any computation and echoed
/// into the output header (threads excluded: results do not depend on it).
struct ExperimentConfig {
  Experiment experiment = Experiment::fig4;
  int n_r = 2;
  int n_t = 2;
  std::vector<double> f_n_grid;
  int levels = 128;                         ///< main quantiser / histogram resolution
  std::vector<int> entropy_levels{32, 64, 128};
  std::size_t chains = 1000;                ///< independent channel sequences
  std::size_t slots_per_chain = 1000;
  int hist_bins = 64;                       ///< fig2 histogram bins per axis
  std::vector<double> gamma_grid;           ///< fig3
  std::size_t mc_samples = 1000000;         ///< fig3 Monte-Carlo draws per gamma
  std::size_t snr_slots = 100000;           ///< fig5a slots per point
  int snr_chains = 10;
  std::vector<int> codebook_bits{1, 2, 3, 4, 5};
  std::size_t training_slots = 100000;
  int lloyd_max_iter = 200;
  double lloyd_tol = 1e-7;
  std::vector<double> eta_grid{0.1, 0.25, 0.5};
  std::vector<double> f_d_grid{10, 20, 50, 100, 200, 500};
  std::string panel = "both";               ///< fig5: a | b | both
  bool warm_start = true;
  BoundKind bound_kind = BoundKind::vonmises_closed;
  BinAlignment alignment = BinAlignment::centered;
  double quad_tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 0;
};

ExperimentConfig default_config(Experiment e);

/// Overlays a JSON object onto the defaults of `e`. Unknown keys, wrong types
/// and out-of-range values throw ConfigError.
ExperimentConfig config_from_json(Experiment e, const std::string& json_text);
void validate(const ExperimentConfig& cfg);
std::string config_to_json(const ExperimentConfig& cfg);

/// A CSV table: `meta` is a one-line JSON object written as the '#' header.
struct Table {
  std::string meta_json;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& os, const Table& t);
std::string format_number(double v);

// --- Simulation core --------------------------------------------------------

struct SimulationSpec {
  int n_r = 2;
  int n_t = 2;
  double f_n = 0.1;
  std::size_t chains = 1000;
  std::size_t slots_per_chain = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool warm_start = true;
};

/// Steering and tracking vectors along independent channel sequences, stored
/// row-major ((N_T-1) angles per slot) in chain order. Chain c uses channel
/// substream c of `seed`, so results do not depend on the thread count.
struct PhaseSamples {
  int dimension = 1;
  std::size_t chains = 0;
  std::size_t slots_per_chain = 0;
  std::vector<double> theta;  ///< chains * slots vectors
  std::vector<double> eps;    ///< chains * (slots - 1) vectors
  std::size_t unconverged = 0;
};

PhaseSamples simulate_phase_samples(const SimulationSpec& spec);

/// Every `dimension`-th element starting at `coord`.
std::vector<double> coordinate(const std::vector<double>& flat, int dimension, int coord);

// --- Experiments ------------------------------------------------------------

Table run_fig2(const ExperimentConfig& cfg);
Table run_fig3(const ExperimentConfig& cfg);
Table run_fig4(const ExperimentConfig& cfg);
Table run_fig5(const ExperimentConfig& cfg);
Table run_bounds_table(const ExperimentConfig& cfg);

}  // namespace fbtrack
