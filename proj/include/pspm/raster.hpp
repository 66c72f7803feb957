#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pspm {

/// Strictly increasing, nonnegative spike timesteps of one neuron.
class SpikeTimes {
 public:
  SpikeTimes() = default;
  /// Throws std::invalid_argument if `times` is not strictly increasing or has a negative entry.
  explicit SpikeTimes(std::vector<std::int64_t> times);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  std::int64_t operator[](std::size_t k) const { return times_[k]; }
  std::span<const std::int64_t> view() const { return times_; }
  auto begin() const { return times_.begin(); }
  auto end() const { return times_.end(); }

  bool operator==(const SpikeTimes&) const = default;

 private:
  std::vector<std::int64_t> times_;
};

struct SpikeCoord {
  std::size_t neuron;
  std::size_t step;
};

/// Binary spike matrix, neurons x timesteps. Stored neuron-major.
class Raster {
 public:
  /// Both dimensions must be positive.
  Raster(std::size_t n_neurons, std::size_t n_steps);

  std::size_t n_neurons() const { return n_neurons_; }
  std::size_t n_steps() const { return n_steps_; }

  bool spike(std::size_t neuron, std::size_t step) const { return bits_[neuron * n_steps_ + step] != 0; }
  void set(std::size_t neuron, std::size_t step, bool value = true) {
    bits_[neuron * n_steps_ + step] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> row(std::size_t neuron) const {
    return {bits_.data() + neuron * n_steps_, n_steps_};
  }

  SpikeTimes spike_times(std::size_t neuron) const;
  std::size_t count(std::size_t neuron) const;
  std::size_t total_count() const;
  /// F(t): number of neurons spiking at each step.
  std::vector<std::size_t> population_counts() const;

  bool operator==(const Raster&) const = default;

 private:
  std::size_t n_neurons_;
  std::size_t n_steps_;
  std::vector<std::uint8_t> bits_;
};

/// Rejects coordinates outside the raster, reporting the first offender.
Raster raster_from_spike_times(std::span<const SpikeCoord> spikes, std::size_t n_neurons, std::size_t n_steps);

/// Throws std::invalid_argument naming `who` if the shapes differ.
void require_same_shape(const Raster& a, const Raster& b, const char* who);

/// Splits along time into `n_chunks` equal pieces; n_steps must be divisible.
std::vector<Raster> split_raster(const Raster& r, std::size_t n_chunks);
/// Time-concatenation of rasters with equal neuron counts.
Raster concat_rasters(std::span<const Raster> parts);

}  // namespace pspm
