#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pspm/lif.hpp"
#include "pspm/matcher.hpp"
#include "pspm/raster.hpp"
#include "pspm/rng.hpp"
#include "pspm/weights.hpp"

namespace pspm {

/// Distribution of |W_ij| in volts. Gaussian draws below zero are clipped to zero.
struct Magnitude {
  enum class Kind { uniform, gaussian };
  Kind kind = Kind::uniform;
  double a = 0.0;  // uniform: lower bound; gaussian: mean
  double b = 0.0;  // uniform: upper bound; gaussian: standard deviation

  static Magnitude uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  static Magnitude gaussian(double mean, double sd) { return {Kind::gaussian, mean, sd}; }
  double draw(SeededRng& rng) const;
};

/// One of the four named reference/naive initialisations.
struct InitConfig {
  std::string name;
  Magnitude reference;
  Magnitude naive;
  double naive_zero_fraction = 0.0;  // share of naive off-diagonal entries forced to zero

  /// "uniform", "gaussian", "sparse" or "naive-half-max"; throws otherwise.
  static InitConfig from_name(std::string_view name);
  static const std::vector<std::string>& names();
};

/// Draws exactly round(fraction * n) inhibitory neurons, uniformly without replacement.
std::vector<NeuronClass> draw_classes(SeededRng& rng, std::size_t n, double inhibitory_fraction);

/// Off-diagonal magnitudes i.i.d. from `m`, signed by the presynaptic class.
/// If zero_fraction > 0, exactly floor(zero_fraction * n (n - 1)) off-diagonal entries are zeroed.
WeightMatrix draw_weights(SeededRng& rng, const std::vector<NeuronClass>& classes, const Magnitude& m,
                          double zero_fraction = 0.0);

struct TrialNetworks {
  WeightMatrix reference;
  WeightMatrix naive;
  WeightMatrix control;  // starts as an exact copy of naive
};

/// Reference, naive and control networks sharing one inhibitory set.
TrialNetworks init_trial(const InitConfig& config, SeededRng& rng, std::size_t n_neurons,
                         double inhibitory_fraction = 0.2);

struct PspmParams {
  std::int64_t a_cap = kDefaultCap;  // steps
  std::int64_t z = 10;               // steps of presynaptic history
  double delta_max = 1e-7;           // V, local update range
  double homeo_unit = 1e-11;         // V per spike of count mismatch
  std::size_t epochs = 150;

  void validate() const;
};

enum class UpdateKind { induce, eliminate, homeostasis };
std::string_view to_string(UpdateKind k);

struct UpdateLogEntry {
  std::size_t epoch = 0;
  // Homeostasis entries touch every synapse and carry post = pre = -1.
  std::int64_t post = -1;
  std::int64_t pre = -1;
  double delta = 0.0;  // signed, before clipping; for homeostasis the signed range bound
  UpdateKind kind = UpdateKind::induce;

  bool operator==(const UpdateLogEntry&) const = default;
};

/// For each unpaired reference spike at t on neuron i, every j != i that fired
/// in `obs` during [t - z, t] gets W_ij += U[0, delta_max]; each unpaired
/// observed spike gets the matching decrease. Each update is clipped so no
/// weight changes sign. Returns the applied updates in order.
std::vector<UpdateLogEntry> local_updates(const Raster& obs, const Raster& ref, const std::vector<PairingResult>& pairing,
                                          WeightMatrix& weights, const PspmParams& params, SeededRng& rng,
                                          std::size_t epoch = 0);

/// Per-synapse additive changes shared by the optimized and control networks.
struct HomeostasisField {
  double bound = 0.0;          // signed: (x - y) * homeo_unit
  std::vector<double> deltas;  // row-major, zero diagonal; empty when x == y
};

/// x = reference spike count, y = observed spike count. Each off-diagonal
/// weight moves by U[0, |x - y| unit], upwards when x > y and downwards when y > x.
HomeostasisField draw_homeostasis(std::size_t x, std::size_t y, std::size_t n_neurons, const PspmParams& params,
                                  SeededRng& rng);
void apply_homeostasis(const HomeostasisField& field, WeightMatrix& weights);
HomeostasisField homeostatic_update(std::size_t x, std::size_t y, WeightMatrix& weights, const PspmParams& params,
                                    SeededRng& rng);

/// Replays each local entry of `log` at a uniformly random off-diagonal synapse
/// whose presynaptic neuron has the same class as the original. Homeostasis
/// entries are skipped; apply the shared HomeostasisField separately.
/// Returns the relocated entries.
std::vector<UpdateLogEntry> control_shadow(const std::vector<UpdateLogEntry>& log, WeightMatrix& control, SeededRng& rng);

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t ref_spikes = 0;
  std::size_t obs_spikes = 0;
  std::size_t unpaired_ref = 0;
  std::size_t unpaired_obs = 0;
  std::size_t local_updates = 0;
  std::size_t control_updates = 0;
  double local_abs_delta = 0.0;
  double control_abs_delta = 0.0;
  std::int64_t pairing_cost = 0;
};

struct PspmOptions {
  bool keep_log = true;
};

struct PspmRun {
  Raster naive_raster;
  Raster optimized_raster;
  Raster control_raster;
  WeightMatrix optimized;
  WeightMatrix control;
  std::vector<UpdateLogEntry> log;  // optimized-network updates, all epochs
  std::vector<EpochStats> epochs;
};

/// Purpose tags of the per-epoch substreams.
inline constexpr std::uint64_t kLocalPurpose = purpose_tag("local");
inline constexpr std::uint64_t kHomeostasisPurpose = purpose_tag("homeostasis");
inline constexpr std::uint64_t kControlPurpose = purpose_tag("control");

/// The learning loop. Each epoch simulates the optimized network on the fixed
/// currents, pairs it against `reference`, applies local and homeostatic
/// updates and mirrors them into the control. Epoch e draws from substreams
/// derive_seed(seed, e, purpose).
PspmRun run_pspm(const Raster& reference, const WeightMatrix& naive, const WeightMatrix& control,
                 const InputCurrents& currents, const PspmParams& params, const NeuronParams& neuron,
                 std::uint64_t seed, PspmOptions options = {});

}  // namespace pspm
