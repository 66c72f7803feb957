#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "pspm/raster.hpp"
#include "pspm/weights.hpp"

namespace pspm {

/// Default kernel width, 5 sqrt(2) steps.
inline const double kDefaultSigma = 5.0 * std::sqrt(2.0);

/// Symmetric Gaussian K(d) = exp(-d^2 / (2 sigma^2)), truncated at |d| <= ceil(6 sigma).
class GaussianKernel {
 public:
  explicit GaussianKernel(double sigma = kDefaultSigma);
  double sigma() const { return sigma_; }
  std::size_t radius() const { return half_.size() - 1; }
  double operator()(std::int64_t d) const {
    const auto a = static_cast<std::size_t>(d < 0 ? -d : d);
    return a < half_.size() ? half_[a] : 0.0;
  }

 private:
  double sigma_;
  std::vector<double> half_;
};

struct ActivitySignal {
  std::vector<double> values;
  double sigma;
};

/// a(t) = sum_s K(t - s) over the spikes s of one train, zero-padded outside [0, T).
ActivitySignal activity_signal(const SpikeTimes& train, std::size_t n_steps, double sigma = kDefaultSigma);
/// A(t): the sum over neurons of the per-neuron activity signals.
ActivitySignal total_activity_signal(const Raster& r, double sigma = kDefaultSigma);

/// D_P: per-neuron squared signal difference summed over time and neurons.
double pairwise_distance(const Raster& s, const Raster& r, double sigma = kDefaultSigma);
/// D_A: squared difference of the total activity signals summed over time.
double aggregate_distance(const Raster& s, const Raster& r, double sigma = kDefaultSigma);

namespace reference {
double pairwise_distance(const Raster& s, const Raster& r, double sigma = kDefaultSigma);
double aggregate_distance(const Raster& s, const Raster& r, double sigma = kDefaultSigma);
}  // namespace reference

/// Inter-spike intervals of every neuron, concatenated in neuron order.
using IsiSample = std::vector<std::int64_t>;
IsiSample isi(const Raster& r);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);
/// Two-sample KS statistic sup |F_a - F_b|.
double ks_statistic(std::vector<std::int64_t> a, std::vector<std::int64_t> b);
/// Statistic plus the asymptotic p-value at effective size n_a n_b / (n_a + n_b).
KsResult ks_two_sample(const IsiSample& a, const IsiSample& b);

struct SpikeStats {
  double mean_count = 0.0;
  double var_count = 0.0;  // population variance over neurons
};
SpikeStats spike_stats(const Raster& r);

/// Sum of squared entry differences (the squared Frobenius norm of A - B).
double weight_frobenius(const WeightMatrix& a, const WeightMatrix& b);

/// Counts per bin of width `bin_width`; the first element pairs a bin's lowest value with its count.
std::vector<std::pair<std::int64_t, std::size_t>> isi_histogram(const IsiSample& a, std::int64_t bin_width = 1);
/// Euclidean distance between the unit-mass histograms of two ISI samples.
double isi_hist_l2(const IsiSample& a, const IsiSample& b, std::int64_t bin_width = 1);

}  // namespace pspm
