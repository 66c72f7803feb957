#include "pspm/metrics.hpp"

namespace pspm::reference {

// Builds every activity signal explicitly and differences them afterwards.

double pairwise_distance(const Raster& s, const Raster& r, double sigma) {
  require_same_shape(s, r, "pairwise_distance");
  double total = 0.0;
  for (std::size_t i = 0; i < s.n_neurons(); ++i) {
    const auto as = activity_signal(s.spike_times(i), s.n_steps(), sigma).values;
    const auto ar = activity_signal(r.spike_times(i), r.n_steps(), sigma).values;
    for (std::size_t t = 0; t < as.size(); ++t) total += (as[t] - ar[t]) * (as[t] - ar[t]);
  }
  return total;
}

double aggregate_distance(const Raster& s, const Raster& r, double sigma) {
  require_same_shape(s, r, "aggregate_distance");
  std::vector<double> diff(s.n_steps(), 0.0);
  for (std::size_t i = 0; i < s.n_neurons(); ++i) {
    const auto as = activity_signal(s.spike_times(i), s.n_steps(), sigma).values;
    const auto ar = activity_signal(r.spike_times(i), r.n_steps(), sigma).values;
    for (std::size_t t = 0; t < diff.size(); ++t) diff[t] += as[t] - ar[t];
  }
  double total = 0.0;
  for (double d : diff) total += d * d;
  return total;
}

}  // namespace pspm::reference
