#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pspm/raster.hpp"
#include "pspm/rng.hpp"

namespace pspm {

/// All-excitatory probabilistic integrate-and-fire network, dimensionless weights.
struct PifNetwork {
  std::size_t n_neurons = 0;
  std::vector<double> w;           // row-major, w[i * n + j] from j onto i
  double connection_prob = 0.0;
  double raw_spectral_radius = 0.0;  // before rescaling
  double spectral_radius = 0.0;      // recomputed after rescaling
};

struct WeightRange {
  double lo = 0.0;
  double hi = 0.02;
};

/// Largest eigenvalue modulus of a nonnegative square matrix by power
/// iteration on (W + I), stopping when the Collatz-Wielandt bounds agree to
/// `rel_tol`. Returns 0 for a nilpotent pattern.
double spectral_radius(std::span<const double> w, std::size_t n, double rel_tol = 1e-9,
                       std::size_t max_iter = 200000);

/// Connects every ordered pair (self-pairs included) with probability p,
/// draws weights from U[lo, hi], then scales so the spectral radius is 1.
/// A draw with zero spectral radius is rebuilt from the next substream.
PifNetwork build_pif(SeededRng& rng, std::size_t n_neurons, double p = 0.10, WeightRange range = {});

/// External drive I_i(t): scale * Poisson(mean), or a fixed value.
struct PifDrive {
  double mean = 1.0;
  double scale = 0.001;
  bool constant = false;

  static PifDrive poisson(double mean, double scale) { return {mean, scale, false}; }
  static PifDrive fixed(double value) { return {0.0, value, true}; }
};

/// s(0) = 0 and s_i(t+1) = Theta[sum_j W_ij s_j(t) + I_i(t) - xi_i(t)], xi ~ U(0,1),
/// Theta(0) = 1. The draws for (t, i) are fixed by the stream of `rng` and the
/// index t * N + i, so the result does not depend on the thread count.
Raster simulate_pif(const PifNetwork& net, const SeededRng& rng, std::size_t n_steps, PifDrive drive = {});

namespace reference {
/// Single-threaded version of simulate_pif; bit-identical output.
Raster simulate_pif(const PifNetwork& net, const SeededRng& rng, std::size_t n_steps, PifDrive drive = {});
}  // namespace reference

namespace detail {
/// Drive and threshold noise for neuron i at step t; shared by both kernels.
inline void pif_draws(const SeededRng& rng, std::size_t n, std::size_t t, std::size_t i, const PifDrive& drive,
                      double& input, double& xi) {
  const std::uint64_t idx = 2 * (static_cast<std::uint64_t>(t) * n + i);
  xi = SeededRng::to_open_unit(SeededRng::draw(rng.seed(), rng.stream(), idx));
  if (drive.constant) {
    input = drive.scale;
  } else {
    const double u = SeededRng::to_unit(SeededRng::draw(rng.seed(), rng.stream(), idx + 1));
    input = drive.scale * SeededRng::poisson_from_uniform(drive.mean, u);
  }
}
void validate_pif(const PifNetwork& net, std::size_t n_steps, const PifDrive& drive);
}  // namespace detail

}  // namespace pspm
