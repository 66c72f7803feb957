#include "pspm/raster.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pspm {

SpikeTimes::SpikeTimes(std::vector<std::int64_t> times) : times_(std::move(times)) {
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (times_[k] < 0) throw std::invalid_argument("spike times: negative time at index " + std::to_string(k));
    if (k > 0 && times_[k] <= times_[k - 1]) {
      throw std::invalid_argument("spike times: not strictly increasing at index " + std::to_string(k));
    }
  }
}

Raster::Raster(std::size_t n_neurons, std::size_t n_steps) : n_neurons_(n_neurons), n_steps_(n_steps) {
  if (n_neurons == 0 || n_steps == 0) throw std::invalid_argument("raster dimensions must be positive");
  bits_.assign(n_neurons * n_steps, 0);
}

SpikeTimes Raster::spike_times(std::size_t neuron) const {
  std::vector<std::int64_t> t;
  const auto r = row(neuron);
  for (std::size_t s = 0; s < n_steps_; ++s)
    if (r[s]) t.push_back(static_cast<std::int64_t>(s));
  return SpikeTimes(std::move(t));
}

std::size_t Raster::count(std::size_t neuron) const {
  const auto r = row(neuron);
  return static_cast<std::size_t>(std::count(r.begin(), r.end(), std::uint8_t{1}));
}

std::size_t Raster::total_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Raster::population_counts() const {
  std::vector<std::size_t> f(n_steps_, 0);
  for (std::size_t i = 0; i < n_neurons_; ++i) {
    const auto r = row(i);
    for (std::size_t t = 0; t < n_steps_; ++t) f[t] += r[t];
  }
  return f;
}

Raster raster_from_spike_times(std::span<const SpikeCoord> spikes, std::size_t n_neurons, std::size_t n_steps) {
  Raster r(n_neurons, n_steps);
  for (const auto& s : spikes) {
    if (s.neuron >= n_neurons || s.step >= n_steps) {
      throw std::out_of_range("spike (" + std::to_string(s.neuron) + ", " + std::to_string(s.step) +
                              ") outside " + std::to_string(n_neurons) + "x" + std::to_string(n_steps) + " raster");
    }
    r.set(s.neuron, s.step);
  }
  return r;
}

void require_same_shape(const Raster& a, const Raster& b, const char* who) {
  if (a.n_neurons() != b.n_neurons() || a.n_steps() != b.n_steps()) {
    throw std::invalid_argument(std::string(who) + ": raster shapes differ (" + std::to_string(a.n_neurons()) + "x" +
                                std::to_string(a.n_steps()) + " vs " + std::to_string(b.n_neurons()) + "x" +
                                std::to_string(b.n_steps()) + ")");
  }
}

std::vector<Raster> split_raster(const Raster& r, std::size_t n_chunks) {
  if (n_chunks == 0 || r.n_steps() % n_chunks != 0) {
    throw std::invalid_argument("split_raster: " + std::to_string(r.n_steps()) + " steps not divisible into " +
                                std::to_string(n_chunks) + " chunks");
  }
  const std::size_t len = r.n_steps() / n_chunks;
  std::vector<Raster> out;
  out.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    Raster piece(r.n_neurons(), len);
    for (std::size_t i = 0; i < r.n_neurons(); ++i)
      for (std::size_t t = 0; t < len; ++t)
        if (r.spike(i, c * len + t)) piece.set(i, t);
    out.push_back(std::move(piece));
  }
  return out;
}

Raster concat_rasters(std::span<const Raster> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rasters: no parts");
  const std::size_t n = parts.front().n_neurons();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.n_neurons() != n) throw std::invalid_argument("concat_rasters: neuron counts differ");
    total += p.n_steps();
  }
  Raster out(n, total);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < p.n_steps(); ++t)
        if (p.spike(i, t)) out.set(i, offset + t);
    offset += p.n_steps();
  }
  return out;
}

}  // namespace pspm
