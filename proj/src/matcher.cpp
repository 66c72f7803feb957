#include "pspm/matcher.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pspm {

PairingResult pair_spikes(const SpikeTimes& ref, const SpikeTimes& obs, std::int64_t a_cap) {
  if (a_cap <= 0) throw std::invalid_argument("pair_spikes: a_cap must be positive");
  const std::size_t n = ref.size();
  const std::size_t m = obs.size();
  const std::size_t width = m + 1;
  std::vector<std::int64_t> cost((n + 1) * width);
  auto at = [&](std::size_t k, std::size_t l) -> std::int64_t& { return cost[k * width + l]; };

  for (std::size_t k = 0; k <= n; ++k) at(k, 0) = static_cast<std::int64_t>(k) * a_cap;
  for (std::size_t l = 0; l <= m; ++l) at(0, l) = static_cast<std::int64_t>(l) * a_cap;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t l = 1; l <= m; ++l) {
      const std::int64_t d = std::abs(ref[k - 1] - obs[l - 1]);
      at(k, l) = std::min({at(k - 1, l - 1) + d, at(k - 1, l) + a_cap, at(k, l - 1) + a_cap,
                           at(k - 1, l - 1) + 2 * a_cap});
    }
  }

  PairingResult out;
  out.total_cost = at(n, m);
  std::size_t k = n, l = m;
  while (k > 0 && l > 0) {
    const std::int64_t here = at(k, l);
    const std::int64_t d = std::abs(ref[k - 1] - obs[l - 1]);
    if (here == at(k - 1, l - 1) + d) {
      out.pairs.emplace_back(k - 1, l - 1);
      --k;
      --l;
    } else if (here == at(k - 1, l) + a_cap) {
      out.unpaired_ref.push_back(--k);
    } else if (here == at(k, l - 1) + a_cap) {
      out.unpaired_obs.push_back(--l);
    } else {
      out.unpaired_ref.push_back(--k);
      out.unpaired_obs.push_back(--l);
    }
  }
  while (k > 0) out.unpaired_ref.push_back(--k);
  while (l > 0) out.unpaired_obs.push_back(--l);

  std::reverse(out.pairs.begin(), out.pairs.end());
  std::reverse(out.unpaired_ref.begin(), out.unpaired_ref.end());
  std::reverse(out.unpaired_obs.begin(), out.unpaired_obs.end());
  return out;
}

std::vector<PairingResult> unpaired_report(const Raster& ref, const Raster& obs, std::int64_t a_cap) {
  require_same_shape(ref, obs, "unpaired_report");
  if (a_cap <= 0) throw std::invalid_argument("unpaired_report: a_cap must be positive");
  const auto n = static_cast<long long>(ref.n_neurons());
  std::vector<PairingResult> out(ref.n_neurons());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out[ii] = pair_spikes(ref.spike_times(ii), obs.spike_times(ii), a_cap);
  }
  return out;
}

}  // namespace pspm
