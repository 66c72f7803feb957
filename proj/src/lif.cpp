#include "pspm/lif.hpp"

#include <cmath>

namespace pspm {

InputCurrents::InputCurrents(std::size_t n_neurons, std::size_t n_steps, double fill)
    : n_neurons_(n_neurons), n_steps_(n_steps), values_(n_neurons * n_steps, fill) {
  if (n_neurons == 0 || n_steps == 0) throw std::invalid_argument("input currents: dimensions must be positive");
}

InputCurrents gen_currents(SeededRng& rng, std::size_t n_neurons, std::size_t n_steps, CurrentSpec spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.mean)) {
    throw std::invalid_argument("gen_currents: sigma must be nonnegative and mean finite");
  }
  InputCurrents currents(n_neurons, n_steps);
  for (std::size_t t = 0; t < n_steps; ++t)
    for (std::size_t i = 0; i < n_neurons; ++i)
      currents(i, t) = spec.sigma == 0.0 ? spec.mean : rng.normal(spec.mean, spec.sigma);
  return currents;
}

namespace {

template <bool kTrace>
void run_lif(const WeightMatrix& weights, const NeuronParams& params, const InputCurrents& currents, Raster& raster,
             std::vector<double>* trace) {
  params.validate();
  const std::size_t n = weights.size();
  const std::size_t steps = currents.n_steps();
  if (currents.n_neurons() != n) {
    throw std::invalid_argument("simulate_lif: " + std::to_string(n) + " neurons but currents for " +
                                std::to_string(currents.n_neurons()));
  }

  // Column-major copy so a presynaptic spike adds one contiguous column.
  std::vector<double> columns(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) columns[j * n + i] = weights(i, j);

  const double leak = params.dt / params.tau;
  std::vector<double> v(n, 0.0);
  std::vector<double> drive(n);
  std::vector<std::size_t> fired, next_fired;
  fired.reserve(n);
  next_fired.reserve(n);

  for (std::size_t t = 0; t < steps; ++t) {
    if (t > 0) {
      for (std::size_t i = 0; i < n; ++i) drive[i] = params.r_m * currents(i, t - 1);
      for (std::size_t j : fired) {
        const double* col = columns.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) drive[i] += col[i];
      }
      for (std::size_t i = 0; i < n; ++i) v[i] += leak * (drive[i] - v[i]);
    }
    next_fired.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(v[i])) throw SimulationError(t, "non-finite membrane potential on neuron " + std::to_string(i));
      if constexpr (kTrace) (*trace)[t * n + i] = v[i];
      if (v[i] >= params.v_th) {
        raster.set(i, t);
        v[i] = 0.0;
        next_fired.push_back(i);
      }
    }
    fired.swap(next_fired);
  }
}

}  // namespace

Raster simulate_lif(const WeightMatrix& weights, const NeuronParams& params, const InputCurrents& currents) {
  Raster raster(weights.size(), currents.n_steps());
  run_lif<false>(weights, params, currents, raster, nullptr);
  return raster;
}

LifTrace simulate_lif_traced(const WeightMatrix& weights, const NeuronParams& params, const InputCurrents& currents) {
  LifTrace out{Raster(weights.size(), currents.n_steps()), std::vector<double>(weights.size() * currents.n_steps())};
  run_lif<true>(weights, params, currents, out.raster, &out.pre_reset_voltage);
  return out;
}

}  // namespace pspm
