#include "pspm/avalanche.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pspm {

double nearest_rank_percentile(std::vector<std::size_t> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return static_cast<double>(values[rank - 1]);
}

AvalancheSet segment_avalanches(std::span<const std::size_t> f, double percentile) {
  AvalancheSet out;
  out.threshold = nearest_rank_percentile(std::vector<std::size_t>(f.begin(), f.end()), percentile);
  std::size_t t = 0;
  while (t < f.size()) {
    if (static_cast<double>(f[t]) > out.threshold) {
      Avalanche a;
      a.start = t;
      while (t < f.size() && static_cast<double>(f[t]) > out.threshold) {
        a.size += static_cast<std::int64_t>(f[t]);
        ++a.duration;
        ++t;
      }
      out.avalanches.push_back(a);
    } else {
      ++t;
    }
  }
  return out;
}

AvalancheSet segment_avalanches(const Raster& r, double percentile) {
  const auto f = r.population_counts();
  return segment_avalanches(std::span<const std::size_t>(f), percentile);
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw std::invalid_argument("hurwitz_zeta: need s > 1 and q > 0");
  // Direct terms up to q + N, then the Euler-Maclaurin tail with Bernoulli corrections.
  constexpr int kDirect = 12;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(q + k, -s);
  const double a = q + kDirect;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  static constexpr double kB2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  // Term j: B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^(-s-2j+1)
  double rising = s;        // s (s+1) ... (s+2j-2)
  double fact = 2.0;        // (2j)!
  double power = std::pow(a, -s - 1.0);
  for (int j = 1; j <= 7; ++j) {
    sum += kB2k[j - 1] / fact * rising * power;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2.0 * j + 1) * (2.0 * j + 2);
    power /= a * a;
  }
  return sum;
}

double fit_power_law_mle(std::span<const std::int64_t> samples, std::int64_t xmin) {
  if (xmin < 1) throw std::invalid_argument("fit_power_law_mle: xmin must be >= 1");
  double log_sum = 0.0;
  std::size_t n = 0;
  std::int64_t lo = 0, hi = 0;
  for (auto x : samples) {
    if (x < xmin) continue;
    if (n == 0) lo = hi = x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    log_sum += std::log(static_cast<double>(x));
    ++n;
  }
  if (n < 50) throw FitError("power-law fit needs at least 50 samples >= xmin, got " + std::to_string(n));
  if (lo == hi) throw FitError("power-law fit diverges: all " + std::to_string(n) + " samples equal");

  const double q = static_cast<double>(xmin);
  const double nn = static_cast<double>(n);
  auto loglik = [&](double g) { return -g * log_sum - nn * std::log(hurwitz_zeta(g, q)); };

  constexpr double kLo = 1.0 + 1e-6;
  constexpr double kHi = 20.0;
  constexpr double kTol = 1e-4;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLo, b = kHi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = loglik(c), fd = loglik(d);
  while (b - a > kTol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = loglik(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = loglik(d);
    }
  }
  const double g = 0.5 * (a + b);
  if (g < kLo + 10 * kTol || g > kHi - 10 * kTol) {
    throw FitError("power-law fit hit the search boundary at exponent " + std::to_string(g));
  }
  return g;
}

double fit_beta_observed(std::span<const Avalanche> avalanches, std::size_t min_count) {
  std::map<std::int64_t, std::pair<double, std::size_t>> by_duration;
  for (const auto& a : avalanches) {
    auto& slot = by_duration[a.duration];
    slot.first += static_cast<double>(a.size);
    ++slot.second;
  }
  std::vector<double> xs, ys;
  for (const auto& [d, acc] : by_duration) {
    if (acc.second < min_count) continue;
    xs.push_back(std::log(static_cast<double>(d)));
    ys.push_back(std::log(acc.first / static_cast<double>(acc.second)));
  }
  if (xs.size() < 2) throw FitError("beta regression needs at least 2 durations with >= " + std::to_string(min_count) + " avalanches");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

double predicted_beta(double tau, double alpha) {
  if (!(tau > 1.0 + 1e-3)) throw FitError("beta_p undefined: size exponent " + std::to_string(tau) + " <= 1.001");
  return (alpha - 1.0) / (tau - 1.0);
}

AvalancheFit fit_beta(const AvalancheSet& avs) {
  const auto& list = avs.avalanches;
  AvalancheFit fit;
  fit.count = list.size();
  if (list.size() < 50) throw FitError("beta fit needs at least 50 avalanches, got " + std::to_string(list.size()));
  std::vector<std::int64_t> sizes, durations;
  sizes.reserve(list.size());
  durations.reserve(list.size());
  for (const auto& a : list) {
    sizes.push_back(a.size);
    durations.push_back(a.duration);
  }
  std::vector<std::int64_t> distinct = durations;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 5) throw FitError("beta fit needs at least 5 distinct durations, got " + std::to_string(distinct.size()));

  fit.tau = fit_power_law_mle(sizes);
  fit.alpha = fit_power_law_mle(durations);
  fit.beta_pred = predicted_beta(fit.tau, fit.alpha);
  fit.beta_obs = fit_beta_observed(list);
  fit.ok = true;
  return fit;
}

AvalancheFit try_fit_beta(const AvalancheSet& avs) {
  try {
    return fit_beta(avs);
  } catch (const FitError& e) {
    AvalancheFit fit;
    fit.count = avs.avalanches.size();
    fit.failure = e.what();
    return fit;
  }
}

}  // namespace pspm
