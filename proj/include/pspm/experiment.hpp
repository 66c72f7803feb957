#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pspm/avalanche.hpp"
#include "pspm/lif.hpp"
#include "pspm/trainer.hpp"
#include "pspm/weights.hpp"

namespace pspm {

/// Raised for an invalid configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Everything a run needs. JSON keys carry their unit (tau_ms, v_th_mv, ...);
/// the struct itself stores SI values.
struct ExperimentConfig {
  std::string experiment = "lif-recovery";  // or "pif-transfer"
  std::string init = "uniform";             // lif-recovery only
  std::size_t n_neurons = 100;
  std::size_t n_steps = 3000;  // per chunk for pif-transfer
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;  // empty: resolved by default_output_dir

  PspmParams pspm;
  NeuronParams neuron;
  CurrentSpec current;

  // pif-transfer
  std::size_t chunks = 2;
  double pif_connection_prob = 0.10;
  double pif_weight_max = 0.02;
  double pif_input_mean = 1.0;
  double pif_input_scale = 0.001;
  double transfer_naive_max = 1e-3;  // V

  double avalanche_percentile = 20.0;
  double sigma = 0.0;  // kernel width in steps; 0 selects 5 sqrt(2)
  std::int64_t isi_bin = 1;
  bool write_update_log = true;
  std::size_t parallel_trials = 0;  // 0: one per available core

  /// Unknown keys and out-of-range values raise ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void validate() const;
  double kernel_sigma() const;
};

inline constexpr const char* kOutputRootEnv = "PSPM_OUTPUT_ROOT";

/// $PSPM_OUTPUT_ROOT (or ./results) joined with "<experiment>-seed<seed>".
std::filesystem::path default_output_dir(const ExperimentConfig& cfg);

/// Metrics of one network's raster against the reference.
struct NetworkMetrics {
  std::string network;  // "N", "O" or "C"
  double d_p = 0.0;
  double d_a = 0.0;
  double ks_stat = 0.0;
  double ks_p = 1.0;
  double isi_l2 = 0.0;
  double mean_count = 0.0;
  double var_count = 0.0;
  std::optional<double> frob_reference;  // ||W - W_R||^2, lif-recovery only
  double frob_naive = 0.0;               // ||W - W_N||^2, mean over chunks
};

struct AvalancheRow {
  std::string network;  // "R", "N", "O" or "C"
  double threshold = 0.0;
  AvalancheFit fit;
};

struct TrialOutcome {
  std::size_t trial = 0;
  bool ok = false;
  std::string error;
  std::vector<NetworkMetrics> metrics;
  std::vector<AvalancheRow> avalanches;
};

struct ExperimentResult {
  std::filesystem::path root;
  std::vector<TrialOutcome> trials;
  std::size_t failed() const;
};

/// Runs every trial and writes the result tree:
///   resolved_config.json, summary.csv, metrics.csv, failures.csv,
///   avalanche.csv (pif-transfer), trial_NNN/ per trial.
/// Trial directories are written to a temporary name and renamed, so the tree
/// content does not depend on trial scheduling. A failing trial is recorded
/// and the others proceed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Figure tables that export_plotdata knows how to produce.
const std::vector<std::string>& plot_figures();

struct ExportReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> missing;  // inputs that were absent or unreadable
};

/// Writes whitespace-separated tables under <tree>/plotdata for each named
/// figure ("raster", "activity", "isi", "distances", "avalanche"). Unknown
/// figure names throw std::invalid_argument.
ExportReport export_plotdata(const std::filesystem::path& tree, const std::vector<std::string>& figures);

}  // namespace pspm
