#include "pspm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pspm {

double Magnitude::draw(SeededRng& rng) const {
  if (kind == Kind::uniform) return rng.uniform(a, b);
  return std::max(0.0, rng.normal(a, b));
}

InitConfig InitConfig::from_name(std::string_view name) {
  constexpr double mV = 1e-3;
  if (name == "uniform") return {"uniform", Magnitude::uniform(0, 5 * mV), Magnitude::uniform(0, 5 * mV), 0.0};
  if (name == "gaussian") {
    return {"gaussian", Magnitude::gaussian(0.4 * mV, 0.4 * mV), Magnitude::gaussian(0.4 * mV, 0.4 * mV), 0.0};
  }
  if (name == "sparse") return {"sparse", Magnitude::uniform(0, 5 * mV), Magnitude::uniform(0, 5 * mV), 0.5};
  if (name == "naive-half-max") {
    return {"naive-half-max", Magnitude::uniform(0, 5 * mV), Magnitude::uniform(0, 2.5 * mV), 0.0};
  }
  throw std::invalid_argument("unknown init config '" + std::string(name) +
                              "' (expected uniform, gaussian, sparse or naive-half-max)");
}

const std::vector<std::string>& InitConfig::names() {
  static const std::vector<std::string> kNames = {"uniform", "gaussian", "sparse", "naive-half-max"};
  return kNames;
}

std::vector<NeuronClass> draw_classes(SeededRng& rng, std::size_t n, double inhibitory_fraction) {
  if (!(inhibitory_fraction >= 0.0 && inhibitory_fraction <= 1.0)) {
    throw std::invalid_argument("inhibitory fraction must lie in [0, 1]");
  }
  const auto n_inh = static_cast<std::size_t>(std::llround(inhibitory_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n_inh slots become the inhibitory set.
  for (std::size_t k = 0; k < n_inh; ++k) std::swap(order[k], order[k + rng.below(n - k)]);
  std::vector<NeuronClass> classes(n, NeuronClass::excitatory);
  for (std::size_t k = 0; k < n_inh; ++k) classes[order[k]] = NeuronClass::inhibitory;
  return classes;
}

WeightMatrix draw_weights(SeededRng& rng, const std::vector<NeuronClass>& classes, const Magnitude& m,
                          double zero_fraction) {
  const std::size_t n = classes.size();
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double mag = m.draw(rng);
      dense[i * n + j] = classes[j] == NeuronClass::inhibitory ? -mag : mag;
    }
  }
  if (zero_fraction > 0.0) {
    std::vector<std::size_t> off;
    off.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off.push_back(i * n + j);
    const auto n_zero = static_cast<std::size_t>(std::floor(zero_fraction * static_cast<double>(off.size())));
    for (std::size_t k = 0; k < n_zero; ++k) {
      std::swap(off[k], off[k + rng.below(off.size() - k)]);
      dense[off[k]] = 0.0;
    }
  }
  return WeightMatrix(classes, std::move(dense));
}

TrialNetworks init_trial(const InitConfig& config, SeededRng& rng, std::size_t n_neurons, double inhibitory_fraction) {
  SeededRng class_rng = rng.substream(purpose_tag("classes"));
  SeededRng ref_rng = rng.substream(purpose_tag("reference-weights"));
  SeededRng naive_rng = rng.substream(purpose_tag("naive-weights"));
  const auto classes = draw_classes(class_rng, n_neurons, inhibitory_fraction);
  WeightMatrix reference = draw_weights(ref_rng, classes, config.reference);
  WeightMatrix naive = draw_weights(naive_rng, classes, config.naive, config.naive_zero_fraction);
  WeightMatrix control = naive;
  return {std::move(reference), std::move(naive), std::move(control)};
}

void PspmParams::validate() const {
  if (a_cap <= 0 || z <= 0 || !(delta_max > 0.0) || !(homeo_unit > 0.0)) {
    throw std::invalid_argument("pspm params: a_cap, z, delta_max and homeo_unit must be positive");
  }
}

std::string_view to_string(UpdateKind k) {
  switch (k) {
    case UpdateKind::induce: return "induce";
    case UpdateKind::eliminate: return "eliminate";
    case UpdateKind::homeostasis: return "homeostasis";
  }
  return "?";
}

std::vector<UpdateLogEntry> local_updates(const Raster& obs, const Raster& ref, const std::vector<PairingResult>& pairing,
                                          WeightMatrix& weights, const PspmParams& params, SeededRng& rng,
                                          std::size_t epoch) {
  require_same_shape(obs, ref, "local_updates");
  const std::size_t n = obs.n_neurons();
  const std::size_t steps = obs.n_steps();
  if (pairing.size() != n || weights.size() != n) throw std::invalid_argument("local_updates: sizes disagree");

  std::vector<std::vector<std::size_t>> fired_at(steps);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = obs.row(j);
    for (std::size_t t = 0; t < steps; ++t)
      if (row[t]) fired_at[t].push_back(j);
  }

  std::vector<UpdateLogEntry> log;
  std::vector<std::size_t> stamp(n, 0);
  std::size_t event = 0;
  std::vector<std::size_t> pool;

  auto apply_event = [&](std::size_t i, std::int64_t t, UpdateKind kind) {
    ++event;
    pool.clear();
    const std::int64_t from = std::max<std::int64_t>(0, t - params.z);
    for (std::int64_t s = from; s <= t; ++s) {
      for (std::size_t j : fired_at[static_cast<std::size_t>(s)]) {
        if (j == i || stamp[j] == event) continue;
        stamp[j] = event;
        pool.push_back(j);
      }
    }
    std::sort(pool.begin(), pool.end());
    const double sign = kind == UpdateKind::induce ? 1.0 : -1.0;
    for (std::size_t j : pool) {
      const double delta = sign * rng.uniform(0.0, params.delta_max);
      weights.add_clipped(i, j, delta);
      log.push_back({epoch, static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), delta, kind});
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pairing[i];
    if (p.unpaired_ref.empty() && p.unpaired_obs.empty()) continue;
    const auto ref_times = ref.spike_times(i);
    const auto obs_times = obs.spike_times(i);
    for (std::size_t k : p.unpaired_ref) apply_event(i, ref_times[k], UpdateKind::induce);
    for (std::size_t l : p.unpaired_obs) apply_event(i, obs_times[l], UpdateKind::eliminate);
  }
  weights.validate();
  return log;
}

HomeostasisField draw_homeostasis(std::size_t x, std::size_t y, std::size_t n, const PspmParams& params,
                                  SeededRng& rng) {
  HomeostasisField field;
  if (x == y) return field;
  const double gap = x > y ? static_cast<double>(x - y) : -static_cast<double>(y - x);
  field.bound = gap * params.homeo_unit;
  const double range = std::abs(field.bound);
  const double sign = gap > 0 ? 1.0 : -1.0;
  field.deltas.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) field.deltas[i * n + j] = sign * rng.uniform(0.0, range);
  return field;
}

void apply_homeostasis(const HomeostasisField& field, WeightMatrix& weights) {
  if (field.deltas.empty()) return;
  const std::size_t n = weights.size();
  if (field.deltas.size() != n * n) throw std::invalid_argument("apply_homeostasis: field size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) weights.add_clipped(i, j, field.deltas[i * n + j]);
  weights.validate();
}

HomeostasisField homeostatic_update(std::size_t x, std::size_t y, WeightMatrix& weights, const PspmParams& params,
                                    SeededRng& rng) {
  auto field = draw_homeostasis(x, y, weights.size(), params, rng);
  apply_homeostasis(field, weights);
  return field;
}

std::vector<UpdateLogEntry> control_shadow(const std::vector<UpdateLogEntry>& log, WeightMatrix& control, SeededRng& rng) {
  const std::size_t n = control.size();
  std::vector<std::size_t> excitatory, inhibitory;
  for (std::size_t j = 0; j < n; ++j)
    (control.neuron_class(j) == NeuronClass::excitatory ? excitatory : inhibitory).push_back(j);

  std::vector<UpdateLogEntry> moved;
  moved.reserve(log.size());
  for (const auto& e : log) {
    if (e.kind == UpdateKind::homeostasis) continue;
    if (n < 2) throw std::invalid_argument("control_shadow: need at least two neurons");
    const auto& pool = control.neuron_class(static_cast<std::size_t>(e.pre)) == NeuronClass::excitatory ? excitatory
                                                                                                         : inhibitory;
    const std::size_t pre = pool[rng.below(pool.size())];
    std::size_t post = rng.below(n - 1);
    if (post >= pre) ++post;
    control.add_clipped(post, pre, e.delta);
    moved.push_back({e.epoch, static_cast<std::int64_t>(post), static_cast<std::int64_t>(pre), e.delta, e.kind});
  }
  control.validate();
  return moved;
}

PspmRun run_pspm(const Raster& reference, const WeightMatrix& naive, const WeightMatrix& control,
                 const InputCurrents& currents, const PspmParams& params, const NeuronParams& neuron,
                 std::uint64_t seed, PspmOptions options) {
  params.validate();
  const std::size_t n = naive.size();
  if (control.size() != n || reference.n_neurons() != n || currents.n_neurons() != n ||
      currents.n_steps() != reference.n_steps()) {
    throw std::invalid_argument("run_pspm: reference, networks and currents disagree in shape");
  }
  if (control.classes() != naive.classes()) throw std::invalid_argument("run_pspm: control classes differ from naive");

  WeightMatrix optimized = naive;
  WeightMatrix shadow = control;
  Raster naive_raster = simulate_lif(naive, neuron, currents);
  Raster current = naive_raster;
  std::vector<UpdateLogEntry> full_log;
  std::vector<EpochStats> stats;
  stats.reserve(params.epochs);
  const std::size_t x = reference.total_count();

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    if (epoch > 0) current = simulate_lif(optimized, neuron, currents);
    const auto pairing = unpaired_report(reference, current, params.a_cap);

    SeededRng local_rng(derive_seed(seed, epoch, kLocalPurpose));
    SeededRng homeo_rng(derive_seed(seed, epoch, kHomeostasisPurpose));
    SeededRng control_rng(derive_seed(seed, epoch, kControlPurpose));

    auto log = local_updates(current, reference, pairing, optimized, params, local_rng, epoch);
    const std::size_t y = current.total_count();
    const auto field = draw_homeostasis(x, y, n, params, homeo_rng);
    apply_homeostasis(field, optimized);

    const auto moved = control_shadow(log, shadow, control_rng);
    apply_homeostasis(field, shadow);

    EpochStats s;
    s.epoch = epoch;
    s.ref_spikes = x;
    s.obs_spikes = y;
    for (const auto& p : pairing) {
      s.unpaired_ref += p.unpaired_ref.size();
      s.unpaired_obs += p.unpaired_obs.size();
      s.pairing_cost += p.total_cost;
    }
    s.local_updates = log.size();
    s.control_updates = moved.size();
    for (const auto& e : log) s.local_abs_delta += std::abs(e.delta);
    for (const auto& e : moved) s.control_abs_delta += std::abs(e.delta);
    stats.push_back(s);

    if (options.keep_log) {
      full_log.insert(full_log.end(), log.begin(), log.end());
      if (!field.deltas.empty()) full_log.push_back({epoch, -1, -1, field.bound, UpdateKind::homeostasis});
    }
  }

  Raster optimized_raster = params.epochs == 0 ? naive_raster : simulate_lif(optimized, neuron, currents);
  Raster control_raster = simulate_lif(shadow, neuron, currents);
  return {std::move(naive_raster), std::move(optimized_raster), std::move(control_raster), std::move(optimized),
          std::move(shadow), std::move(full_log), std::move(stats)};
}

}  // namespace pspm
