#include "pspm/metrics.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pspm {

GaussianKernel::GaussianKernel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("kernel sigma must be positive");
  const auto radius = static_cast<std::size_t>(std::ceil(6.0 * sigma));
  half_.resize(radius + 1);
  for (std::size_t d = 0; d <= radius; ++d) {
    const double x = static_cast<double>(d);
    half_[d] = std::exp(-x * x / (2.0 * sigma * sigma));
  }
}

namespace {

void add_kernel(std::vector<double>& signal, std::int64_t at, const GaussianKernel& k, double weight) {
  const auto r = static_cast<std::int64_t>(k.radius());
  const auto t_max = static_cast<std::int64_t>(signal.size()) - 1;
  const std::int64_t lo = std::max<std::int64_t>(0, at - r);
  const std::int64_t hi = std::min<std::int64_t>(t_max, at + r);
  for (std::int64_t t = lo; t <= hi; ++t) signal[static_cast<std::size_t>(t)] += weight * k(t - at);
}

}  // namespace

ActivitySignal activity_signal(const SpikeTimes& train, std::size_t n_steps, double sigma) {
  const GaussianKernel k(sigma);
  ActivitySignal out{std::vector<double>(n_steps, 0.0), sigma};
  for (auto t : train) {
    if (static_cast<std::size_t>(t) >= n_steps) throw std::out_of_range("activity_signal: spike past the window");
    add_kernel(out.values, t, k, 1.0);
  }
  return out;
}

ActivitySignal total_activity_signal(const Raster& r, double sigma) {
  const GaussianKernel k(sigma);
  ActivitySignal out{std::vector<double>(r.n_steps(), 0.0), sigma};
  const auto f = r.population_counts();
  for (std::size_t t = 0; t < f.size(); ++t)
    if (f[t]) add_kernel(out.values, static_cast<std::int64_t>(t), k, static_cast<double>(f[t]));
  return out;
}

double pairwise_distance(const Raster& s, const Raster& r, double sigma) {
  require_same_shape(s, r, "pairwise_distance");
  const GaussianKernel k(sigma);
  const std::size_t n = s.n_neurons();
  const std::size_t steps = s.n_steps();
  std::vector<double> per_neuron(n, 0.0);
  const auto n_i = static_cast<long long>(n);
#pragma omp parallel
  {
    std::vector<double> diff(steps);
#pragma omp for schedule(dynamic, 4)
    for (long long ii = 0; ii < n_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::fill(diff.begin(), diff.end(), 0.0);
      const auto rs = s.row(i);
      const auto rr = r.row(i);
      bool any = false;
      for (std::size_t t = 0; t < steps; ++t) {
        const int d = static_cast<int>(rs[t]) - static_cast<int>(rr[t]);
        if (d != 0) {
          add_kernel(diff, static_cast<std::int64_t>(t), k, d);
          any = true;
        }
      }
      double sum = 0.0;
      if (any)
        for (double v : diff) sum += v * v;
      per_neuron[i] = sum;
    }
  }
  double total = 0.0;
  for (double v : per_neuron) total += v;
  return total;
}

double aggregate_distance(const Raster& s, const Raster& r, double sigma) {
  require_same_shape(s, r, "aggregate_distance");
  const GaussianKernel k(sigma);
  const auto fs = s.population_counts();
  const auto fr = r.population_counts();
  const auto steps = static_cast<std::int64_t>(fs.size());
  const auto radius = static_cast<std::int64_t>(k.radius());
  std::vector<double> delta(fs.size());
  for (std::size_t t = 0; t < fs.size(); ++t) delta[t] = static_cast<double>(fs[t]) - static_cast<double>(fr[t]);

  std::vector<double> sq(fs.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < steps; ++t) {
    double a = 0.0;
    const std::int64_t lo = std::max<std::int64_t>(0, t - radius);
    const std::int64_t hi = std::min<std::int64_t>(steps - 1, t + radius);
    for (std::int64_t u = lo; u <= hi; ++u) {
      const double d = delta[static_cast<std::size_t>(u)];
      if (d != 0.0) a += d * k(t - u);
    }
    sq[static_cast<std::size_t>(t)] = a * a;
  }
  double total = 0.0;
  for (double v : sq) total += v;
  return total;
}

IsiSample isi(const Raster& r) {
  IsiSample out;
  for (std::size_t i = 0; i < r.n_neurons(); ++i) {
    const auto times = r.spike_times(i);
    for (std::size_t k = 1; k < times.size(); ++k) out.push_back(times[k] - times[k - 1]);
  }
  return out;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small arguments.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-static_cast<double>((2 * k - 1) * (2 * k - 1)) * c);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    std::int64_t x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
    else x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KsResult ks_two_sample(const IsiSample& a, const IsiSample& b) {
  KsResult out;
  out.statistic = ks_statistic(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  out.p_value = kolmogorov_survival(std::sqrt(na * nb / (na + nb)) * out.statistic);
  return out;
}

SpikeStats spike_stats(const Raster& r) {
  const double n = static_cast<double>(r.n_neurons());
  double mean = 0.0;
  std::vector<double> counts(r.n_neurons());
  for (std::size_t i = 0; i < r.n_neurons(); ++i) {
    counts[i] = static_cast<double>(r.count(i));
    mean += counts[i];
  }
  mean /= n;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  return {mean, var / n};
}

double weight_frobenius(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("weight_frobenius: matrix sizes differ");
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) sum += (da[k] - db[k]) * (da[k] - db[k]);
  return sum;
}

namespace {

std::map<std::int64_t, std::size_t> bin_counts(const IsiSample& a, std::int64_t w) {
  std::map<std::int64_t, std::size_t> bins;
  for (auto x : a) {
    // Floor division keeps bins aligned at multiples of w for any sign.
    std::int64_t q = x / w;
    if (x % w != 0 && x < 0) --q;
    ++bins[q];
  }
  return bins;
}

}  // namespace

std::vector<std::pair<std::int64_t, std::size_t>> isi_histogram(const IsiSample& a, std::int64_t bin_width) {
  if (bin_width < 1) throw std::invalid_argument("isi_histogram: bin width must be >= 1");
  std::vector<std::pair<std::int64_t, std::size_t>> out;
  for (const auto& [bin, count] : bin_counts(a, bin_width)) out.emplace_back(bin * bin_width, count);
  return out;
}

double isi_hist_l2(const IsiSample& a, const IsiSample& b, std::int64_t bin_width) {
  if (bin_width < 1) throw std::invalid_argument("isi_hist_l2: bin width must be >= 1");
  if (a.empty() || b.empty()) throw std::invalid_argument("isi_hist_l2: both samples must be nonempty");
  const auto ha = bin_counts(a, bin_width);
  const auto hb = bin_counts(b, bin_width);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::map<std::int64_t, double> diff;
  for (const auto& [bin, c] : ha) diff[bin] += static_cast<double>(c) / na;
  for (const auto& [bin, c] : hb) diff[bin] -= static_cast<double>(c) / nb;
  double sum = 0.0;
  for (const auto& [bin, d] : diff) sum += d * d;
  return std::sqrt(sum);
}

}  // namespace pspm
