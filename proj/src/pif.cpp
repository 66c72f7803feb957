#include "pspm/pif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pspm {

double spectral_radius(std::span<const double> w, std::size_t n, double rel_tol, std::size_t max_iter) {
  if (w.size() != n * n || n == 0) throw std::invalid_argument("spectral_radius: matrix is not n x n");
  for (double v : w)
    if (!(v >= 0.0)) throw std::invalid_argument("spectral_radius: matrix must be nonnegative");

  // The shift keeps the iteration aperiodic without moving the Perron vector.
  // On reducible patterns the iterate concentrates on the classes fed by the
  // dominant one; entries that decay below kSupport of the maximum belong to
  // weaker classes and are left out of the Collatz-Wielandt bounds.
  constexpr double kSupport = 1e-10;
  std::vector<double> x(n, 1.0), y(n);
  double lower = 0.0, upper = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = w.data() + i * n;
      double s = x[i];
      for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    lower = std::numeric_limits<double>::infinity();
    upper = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      norm = std::max(norm, y[i]);
      if (x[i] < kSupport) continue;
      const double ratio = y[i] / x[i];
      lower = std::min(lower, ratio);
      upper = std::max(upper, ratio);
    }
    if (upper - lower <= rel_tol * upper) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return std::max(0.0, 0.5 * (lower + upper) - 1.0);
}

PifNetwork build_pif(SeededRng& rng, std::size_t n_neurons, double p, WeightRange range) {
  if (n_neurons == 0) throw std::invalid_argument("build_pif: need at least one neuron");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("build_pif: connection probability must lie in (0, 1]");
  if (!(range.lo >= 0.0 && range.hi >= range.lo)) throw std::invalid_argument("build_pif: weight range must be nonnegative");
  if (range.hi == 0.0) throw std::invalid_argument("build_pif: all weights would be zero");

  constexpr int kMaxRebuilds = 64;
  for (int attempt = 0; attempt < kMaxRebuilds; ++attempt) {
    SeededRng draw = rng.substream(static_cast<std::uint64_t>(attempt));
    PifNetwork net;
    net.n_neurons = n_neurons;
    net.connection_prob = p;
    net.w.assign(n_neurons * n_neurons, 0.0);
    for (auto& v : net.w) {
      const bool connected = p >= 1.0 || draw.uniform() < p;
      if (connected) v = range.lo == range.hi ? range.lo : draw.uniform(range.lo, range.hi);
    }
    const double lambda = spectral_radius(net.w, n_neurons);
    if (lambda <= 0.0) continue;
    for (auto& v : net.w) v /= lambda;
    net.raw_spectral_radius = lambda;
    net.spectral_radius = spectral_radius(net.w, n_neurons);
    return net;
  }
  throw std::runtime_error("build_pif: " + std::to_string(kMaxRebuilds) + " draws with zero spectral radius");
}

namespace detail {

void validate_pif(const PifNetwork& net, std::size_t n_steps, const PifDrive& drive) {
  if (n_steps == 0) throw std::invalid_argument("simulate_pif: n_steps must be at least 1");
  if (net.n_neurons == 0 || net.w.size() != net.n_neurons * net.n_neurons) {
    throw std::invalid_argument("simulate_pif: malformed network");
  }
  if (!(drive.mean >= 0.0) || !std::isfinite(drive.scale)) throw std::invalid_argument("simulate_pif: bad drive");
}

}  // namespace detail

Raster simulate_pif(const PifNetwork& net, const SeededRng& rng, std::size_t n_steps, PifDrive drive) {
  detail::validate_pif(net, n_steps, drive);
  const std::size_t n = net.n_neurons;
  Raster raster(n, n_steps);
  std::vector<unsigned char> state(n, 0), next(n, 0);
  std::vector<std::size_t> active;
  active.reserve(n);

  for (std::size_t t = 0; t + 1 < n_steps; ++t) {
    active.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (state[j]) active.push_back(j);
    const auto n_i = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < n_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double* row = net.w.data() + i * n;
      double arg = 0.0;
      for (std::size_t j : active) arg += row[j];
      double input, xi;
      detail::pif_draws(rng, n, t, i, drive, input, xi);
      next[i] = (arg + input - xi >= 0.0) ? 1 : 0;
    }
    state.swap(next);
    for (std::size_t i = 0; i < n; ++i)
      if (state[i]) raster.set(i, t + 1);
  }
  return raster;
}

}  // namespace pspm
