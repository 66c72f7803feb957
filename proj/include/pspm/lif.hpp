#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pspm/raster.hpp"
#include "pspm/rng.hpp"
#include "pspm/weights.hpp"

namespace pspm {

/// External current (amperes) per neuron and step, stored step-major.
class InputCurrents {
 public:
  InputCurrents(std::size_t n_neurons, std::size_t n_steps, double fill = 0.0);

  std::size_t n_neurons() const { return n_neurons_; }
  std::size_t n_steps() const { return n_steps_; }
  double operator()(std::size_t neuron, std::size_t step) const { return values_[step * n_neurons_ + neuron]; }
  double& operator()(std::size_t neuron, std::size_t step) { return values_[step * n_neurons_ + neuron]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_neurons_;
  std::size_t n_steps_;
  std::vector<double> values_;
};

struct CurrentSpec {
  double mean = 2.5e-10;   // A
  double sigma = 1.0e-10;  // A
};

/// I.i.d. Gaussian currents, drawn step by step then neuron by neuron.
InputCurrents gen_currents(SeededRng& rng, std::size_t n_neurons, std::size_t n_steps, CurrentSpec spec = {});

class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Forward-Euler LIF network. V starts at 0; for t >= 1
///   V(t) = V(t-1) + (dt/tau) (-V(t-1) + R_m I(t-1) + sum_j W_ij s_j(t-1)),
/// and a neuron with V(t) >= V_th records s(t) = 1 and resets to 0.
/// Spikes therefore reach their targets one step later.
Raster simulate_lif(const WeightMatrix& weights, const NeuronParams& params, const InputCurrents& currents);

struct LifTrace {
  Raster raster;
  std::vector<double> pre_reset_voltage;  // step-major, N x T
};

/// Same dynamics as simulate_lif, also returning the pre-reset membrane potential.
LifTrace simulate_lif_traced(const WeightMatrix& weights, const NeuronParams& params, const InputCurrents& currents);

}  // namespace pspm
