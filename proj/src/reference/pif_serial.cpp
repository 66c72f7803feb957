#include "pspm/pif.hpp"

namespace pspm::reference {

Raster simulate_pif(const PifNetwork& net, const SeededRng& rng, std::size_t n_steps, PifDrive drive) {
  detail::validate_pif(net, n_steps, drive);
  const std::size_t n = net.n_neurons;
  Raster raster(n, n_steps);
  for (std::size_t t = 0; t + 1 < n_steps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double arg = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (raster.spike(j, t)) arg += net.w[i * n + j];
      double input, xi;
      detail::pif_draws(rng, n, t, i, drive, input, xi);
      if (arg + input - xi >= 0.0) raster.set(i, t + 1);
    }
  }
  return raster;
}

}  // namespace pspm::reference
