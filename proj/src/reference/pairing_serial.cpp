#include "pspm/matcher.hpp"

namespace pspm::reference {

std::vector<PairingResult> unpaired_report(const Raster& ref, const Raster& obs, std::int64_t a_cap) {
  require_same_shape(ref, obs, "unpaired_report");
  std::vector<PairingResult> out;
  out.reserve(ref.n_neurons());
  for (std::size_t i = 0; i < ref.n_neurons(); ++i) out.push_back(pair_spikes(ref.spike_times(i), obs.spike_times(i), a_cap));
  return out;
}

}  // namespace pspm::reference
