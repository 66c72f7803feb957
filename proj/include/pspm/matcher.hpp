#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "pspm/raster.hpp"

namespace pspm {

/// Default pairing cap: 15 steps, about 45 ms at dt = 3 ms.
inline constexpr std::int64_t kDefaultCap = 15;

/// Optimal order-preserving pairing of a reference and an observed spike train.
/// Indices are 0-based positions in the input trains.
struct PairingResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (ref k, obs l), increasing in both
  std::vector<std::size_t> unpaired_ref;
  std::vector<std::size_t> unpaired_obs;
  std::int64_t total_cost = 0;

  bool operator==(const PairingResult&) const = default;
};

/// Fills the cost table
///   C[k][l] = min(C[k-1][l-1] + |r_k - o_l|, C[k-1][l] + cap, C[k][l-1] + cap, C[k-1][l-1] + 2 cap)
/// with C[k][0] = k cap and C[0][l] = l cap, then backtracks from (n, m).
/// Ties resolve in the order pair, skip-ref, skip-obs, skip-both.
PairingResult pair_spikes(const SpikeTimes& ref, const SpikeTimes& obs, std::int64_t a_cap = kDefaultCap);

/// Independent pairing for every neuron of two same-shaped rasters (OpenMP over neurons).
std::vector<PairingResult> unpaired_report(const Raster& ref, const Raster& obs, std::int64_t a_cap = kDefaultCap);

namespace reference {
std::vector<PairingResult> unpaired_report(const Raster& ref, const Raster& obs, std::int64_t a_cap = kDefaultCap);
}  // namespace reference

}  // namespace pspm
