// Independent oracles and random generators shared by the unit and acceptance tests.
// Generators use std::mt19937_64 so test inputs do not depend on the library RNG.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "pspm/raster.hpp"

namespace oracle {

using Engine = std::mt19937_64;

inline std::vector<std::int64_t> random_train(Engine& g, std::size_t max_spikes, std::int64_t horizon) {
  std::uniform_int_distribution<std::size_t> count(0, max_spikes);
  std::vector<std::int64_t> all(static_cast<std::size_t>(horizon));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), g);
  all.resize(std::min<std::size_t>(count(g), all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

inline pspm::Raster random_raster(Engine& g, std::size_t n, std::size_t t, double rate) {
  std::bernoulli_distribution b(rate);
  pspm::Raster r(n, t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < t; ++s)
      if (b(g)) r.set(i, s);
  return r;
}

// Minimum over every order-preserving partial matching: pick equal-size index
// subsets of both trains and pair them in order.
inline std::int64_t brute_force_pairing_cost(const std::vector<std::int64_t>& ref, const std::vector<std::int64_t>& obs,
                                             std::int64_t cap) {
  const std::size_t n = ref.size(), m = obs.size();
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mr = 0; mr < (1u << n); ++mr) {
    for (std::uint32_t mo = 0; mo < (1u << m); ++mo) {
      if (__builtin_popcount(mr) != __builtin_popcount(mo)) continue;
      std::vector<std::int64_t> a, b;
      for (std::size_t k = 0; k < n; ++k)
        if (mr >> k & 1u) a.push_back(ref[k]);
      for (std::size_t l = 0; l < m; ++l)
        if (mo >> l & 1u) b.push_back(obs[l]);
      std::int64_t cost = cap * static_cast<std::int64_t>(n + m - 2 * a.size());
      for (std::size_t p = 0; p < a.size(); ++p) cost += std::llabs(a[p] - b[p]);
      best = std::min(best, cost);
    }
  }
  return best;
}

inline double kernel(double d, double sigma) {
  if (std::fabs(d) > std::ceil(6.0 * sigma)) return 0.0;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

// a(t) by direct summation over every spike of the row.
inline std::vector<double> direct_signal(const pspm::Raster& r, std::size_t i, double sigma) {
  std::vector<double> a(r.n_steps(), 0.0);
  for (std::size_t t = 0; t < r.n_steps(); ++t)
    for (std::size_t s = 0; s < r.n_steps(); ++s)
      if (r.spike(i, s)) a[t] += kernel(static_cast<double>(t) - static_cast<double>(s), sigma);
  return a;
}

inline double direct_pairwise(const pspm::Raster& x, const pspm::Raster& y, double sigma) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.n_neurons(); ++i) {
    const auto a = direct_signal(x, i, sigma), b = direct_signal(y, i, sigma);
    for (std::size_t t = 0; t < a.size(); ++t) d += (a[t] - b[t]) * (a[t] - b[t]);
  }
  return d;
}

inline double direct_aggregate(const pspm::Raster& x, const pspm::Raster& y, double sigma) {
  std::vector<double> diff(x.n_steps(), 0.0);
  for (std::size_t i = 0; i < x.n_neurons(); ++i) {
    const auto a = direct_signal(x, i, sigma), b = direct_signal(y, i, sigma);
    for (std::size_t t = 0; t < a.size(); ++t) diff[t] += a[t] - b[t];
  }
  double d = 0.0;
  for (double v : diff) d += v * v;
  return d;
}

// sup |F_a - F_b| by evaluating both ECDFs at every observed value.
inline double ecdf_scan_ks(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> pts(a);
  pts.insert(pts.end(), b.begin(), b.end());
  double best = 0.0;
  for (std::int64_t v : pts) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [v](auto x) { return x <= v; })) /
                      static_cast<double>(a.size());
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [v](auto x) { return x <= v; })) /
                      static_cast<double>(b.size());
    best = std::max(best, std::fabs(fa - fb));
  }
  return best;
}

// Permutation p-value of the two-sample KS statistic: the share of label
// shuffles whose statistic reaches the observed one.
inline double permutation_ks_p(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                               std::size_t draws, Engine& g) {
  struct Obs {
    std::int64_t v;
    bool in_a;
  };
  std::vector<Obs> pooled;
  for (auto v : a) pooled.push_back({v, true});
  for (auto v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(), [](const Obs& x, const Obs& y) { return x.v < y.v; });
  std::vector<std::size_t> group_end;  // exclusive end of each tie group
  for (std::size_t k = 1; k <= pooled.size(); ++k)
    if (k == pooled.size() || pooled[k].v != pooled[k - 1].v) group_end.push_back(k);
  std::vector<char> labels(pooled.size());
  for (std::size_t k = 0; k < pooled.size(); ++k) labels[k] = pooled[k].in_a;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  auto stat = [&](const std::vector<char>& lab) {
    std::size_t ca = 0, cb = 0, k = 0;
    double best = 0.0;
    for (std::size_t end : group_end) {
      for (; k < end; ++k) (lab[k] ? ca : cb)++;
      best = std::max(best, std::fabs(static_cast<double>(ca) / na - static_cast<double>(cb) / nb));
    }
    return best;
  };
  const double observed = stat(labels);
  std::size_t hits = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    std::shuffle(labels.begin(), labels.end(), g);
    if (stat(labels) >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

// Discrete power law P(k) ~ k^-tau on k >= 1: exact inverse CDF over the first
// 10^6 values, then a continuous Pareto tail rounded down.
class PowerLawSampler {
 public:
  explicit PowerLawSampler(double tau, std::size_t head = 1000000) : tau_(tau), cdf_(head) {
    double s = 0.0;
    for (std::size_t k = 1; k <= head; ++k) {
      s += std::pow(static_cast<double>(k), -tau);
      cdf_[k - 1] = s;
    }
    const double k0 = static_cast<double>(head) + 0.5;
    tail_mass_ = std::pow(k0, 1.0 - tau) / (tau - 1.0);
    const double total = s + tail_mass_;
    for (double& c : cdf_) c /= total;
    head_mass_ = s / total;
  }

  std::int64_t operator()(Engine& g) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(g);
    if (u < head_mass_) {
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return static_cast<std::int64_t>(it - cdf_.begin()) + 1;
    }
    const double k0 = static_cast<double>(cdf_.size()) + 0.5;
    const double v = (u - head_mass_) / (1.0 - head_mass_);
    const double x = k0 * std::pow(1.0 - v, -1.0 / (tau_ - 1.0));
    return static_cast<std::int64_t>(std::min(x + 0.5, 9.0e18));
  }

 private:
  double tau_;
  std::vector<double> cdf_;
  double tail_mass_ = 0.0;
  double head_mass_ = 1.0;
};

}  // namespace oracle
