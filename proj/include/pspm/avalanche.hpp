#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspm/raster.hpp"

namespace pspm {

struct Avalanche {
  std::int64_t size = 0;      // spikes in the run
  std::int64_t duration = 0;  // steps in the run
  std::size_t start = 0;
};

struct AvalancheSet {
  std::vector<Avalanche> avalanches;
  double threshold = 0.0;
};

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (rank at least 1).
double nearest_rank_percentile(std::vector<std::size_t> values, double percentile);

/// Maximal runs of F(t) = sum_i s_i(t) strictly above the given percentile of F.
AvalancheSet segment_avalanches(const Raster& r, double percentile = 20.0);
/// Same, starting from a precomputed F(t).
AvalancheSet segment_avalanches(std::span<const std::size_t> population, double percentile = 20.0);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hurwitz zeta sum_{k>=0} (q + k)^-s for s > 1, q > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double q);

/// Exponent of P(x) = x^-g / zeta(g, xmin) maximising the likelihood (golden
/// section to 1e-4). Throws FitError for fewer than 50 samples at or above
/// xmin, for a constant sample, or when the optimum sits on the search boundary.
double fit_power_law_mle(std::span<const std::int64_t> samples, std::int64_t xmin = 1);

/// Least-squares slope of log <S> against log D over durations seen at least `min_count` times.
double fit_beta_observed(std::span<const Avalanche> avalanches, std::size_t min_count = 3);

struct AvalancheFit {
  std::size_t count = 0;
  double tau = 0.0;        // size exponent
  double alpha = 0.0;      // duration exponent
  double beta_pred = 0.0;  // (alpha - 1) / (tau - 1)
  double beta_obs = 0.0;
  bool ok = false;
  std::string failure;     // set when ok is false

  double beta_gap() const { return beta_obs - beta_pred < 0 ? beta_pred - beta_obs : beta_obs - beta_pred; }
};

/// (alpha - 1) / (tau - 1); throws FitError when tau <= 1 + 1e-3.
double predicted_beta(double tau, double alpha);

/// Throws FitError when preconditions fail (fewer than 50 avalanches, fewer
/// than 5 distinct durations, or tau too close to 1).
AvalancheFit fit_beta(const AvalancheSet& avs);
/// As fit_beta, reporting failures in the result instead of throwing.
AvalancheFit try_fit_beta(const AvalancheSet& avs);

}  // namespace pspm
