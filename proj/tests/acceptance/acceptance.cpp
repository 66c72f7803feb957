// Acceptance suite: one PASS/FAIL line per criterion.
//
//   pspm_acceptance            run every criterion
//   pspm_acceptance --only 3   run one criterion
//
// Exit status is nonzero when any criterion that ran failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pspm/avalanche.hpp"
#include "pspm/experiment.hpp"
#include "pspm/lif.hpp"
#include "pspm/matcher.hpp"
#include "pspm/metrics.hpp"
#include "pspm/pif.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace pspm;

namespace {

// Pinned tolerances and sizes.
constexpr std::size_t kMatcherPairs = 1000;
constexpr std::size_t kMatcherMaxSpikes = 6;
constexpr double kMatcherSeconds = 5.0;
constexpr std::size_t kKsStatPairs = 500;
constexpr std::size_t kKsPvalPairs = 20;
constexpr std::size_t kKsPvalSize = 100;
constexpr std::size_t kKsPermutations = 100000;
constexpr double kKsPvalTol = 0.02;
constexpr double kDistanceRelTol = 1e-12;
constexpr double kExponentTol = 0.1;
constexpr std::size_t kPowerLawSamples = 10000;
constexpr std::size_t kMinAvalanches = 5000;
constexpr double kBetaGapTol = 0.15;
constexpr double kPifSeconds = 600.0;
constexpr double kRecoverySeconds = 1800.0;

// Desk-scale learning rates: the default delta_max and homeostasis unit scaled by 3000.
constexpr double kDeskDeltaMax = 3e-4;
constexpr double kDeskHomeoUnit = 3e-8;

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pspm_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const NetworkMetrics& row(const TrialOutcome& t, const char* net) {
  for (const auto& m : t.metrics)
    if (m.network == net) return m;
  throw std::runtime_error(std::string("missing network row ") + net);
}

const AvalancheFit& fit_of(const TrialOutcome& t, const char* net) {
  for (const auto& a : t.avalanches)
    if (a.network == net) return a.fit;
  throw std::runtime_error(std::string("missing avalanche row ") + net);
}

Verdict matcher_optimality() {
  oracle::Engine g(1001);
  const auto t0 = Clock::now();
  std::size_t agree = 0;
  for (std::size_t k = 0; k < kMatcherPairs; ++k) {
    const auto a = oracle::random_train(g, kMatcherMaxSpikes, 100);
    const auto b = oracle::random_train(g, kMatcherMaxSpikes, 100);
    agree += pair_spikes(SpikeTimes(a), SpikeTimes(b)).total_cost == oracle::brute_force_pairing_cost(a, b, kDefaultCap);
  }
  const double secs = seconds_since(t0);
  return {agree == kMatcherPairs && secs < kMatcherSeconds,
          fmt("matcher optimality: %zu/%zu costs equal the exhaustive minimum in %.2f s (limit %.0f s)", agree,
              kMatcherPairs, secs, kMatcherSeconds)};
}

Verdict lif_closed_form() {
  const NeuronParams p;
  const WeightMatrix lone({NeuronClass::excitatory});
  const Raster hi = simulate_lif(lone, p, InputCurrents(1, 100, 60e-3 / p.r_m));
  const auto times = hi.spike_times(0);
  const std::int64_t first = times.empty() ? -1 : times[0];
  const std::size_t low = simulate_lif(lone, p, InputCurrents(1, 10000, 25e-3 / p.r_m)).total_count();
  return {first == 7 && low == 0,
          fmt("LIF closed form: first spike at 60 mV on step %lld (expected 7); %zu spikes at 25 mV over 10^4 steps "
              "(expected 0)",
              static_cast<long long>(first), low)};
}

struct RecoveryRuns {
  std::vector<std::pair<std::string, ExperimentResult>> by_config;
  double seconds = 0.0;
};

const RecoveryRuns& recovery_runs() {
  static const RecoveryRuns runs = [] {
    RecoveryRuns r;
    const auto t0 = Clock::now();
    for (const auto& name : InitConfig::names()) {
      ExperimentConfig c;
      c.experiment = "lif-recovery";
      c.init = name;
      c.n_neurons = 100;
      c.n_steps = 3000;
      c.pspm.epochs = 50;
      c.trials = 10;
      c.seed = 1;
      c.pspm.delta_max = kDeskDeltaMax;
      c.pspm.homeo_unit = kDeskHomeoUnit;
      c.write_update_log = false;
      c.output_dir = scratch_dir("recovery_" + name);
      r.by_config.emplace_back(name, run_experiment(c));
      fs::remove_all(c.output_dir);
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Verdict distance_ordering() {
  const RecoveryRuns& runs = recovery_runs();
  bool pass = runs.seconds < kRecoverySeconds;
  std::string detail = "distance ordering (mean over trials, O vs N and C):";
  for (const auto& [name, res] : runs.by_config) {
    double dp[3] = {0, 0, 0}, da[3] = {0, 0, 0};
    std::size_t ok = 0;
    for (const auto& t : res.trials) {
      if (!t.ok) continue;
      ++ok;
      const char* nets[] = {"N", "O", "C"};
      for (int k = 0; k < 3; ++k) {
        dp[k] += row(t, nets[k]).d_p;
        da[k] += row(t, nets[k]).d_a;
      }
    }
    for (int k = 0; k < 3; ++k) {
      dp[k] /= static_cast<double>(std::max<std::size_t>(ok, 1));
      da[k] /= static_cast<double>(std::max<std::size_t>(ok, 1));
    }
    const bool good = ok == res.trials.size() && dp[1] < dp[0] && dp[1] < dp[2] && da[1] < da[0] && da[1] < da[2];
    pass &= good;
    detail += fmt(" %s D_P N/O/C %.0f/%.0f/%.0f D_A %.3g/%.3g/%.3g%s;", name.c_str(), dp[0], dp[1], dp[2], da[0], da[1],
                  da[2], good ? "" : " [ordering fails]");
  }
  detail += fmt(" %.0f s total (limit %.0f s)", runs.seconds, kRecoverySeconds);
  return {pass, detail};
}

Verdict weight_non_recovery() {
  const RecoveryRuns& runs = recovery_runs();
  bool pass = true;
  std::string detail = "weight non-recovery (trials with |O-R|^2 >= |N-R|^2; medians):";
  for (const auto& [name, res] : runs.by_config) {
    std::vector<double> fo, fn;
    std::size_t not_smaller = 0;
    for (const auto& t : res.trials) {
      if (!t.ok) continue;
      const double o = *row(t, "O").frob_reference, n = *row(t, "N").frob_reference;
      fo.push_back(o);
      fn.push_back(n);
      not_smaller += o >= n;
    }
    const bool judged = name != "naive-half-max";
    const bool good = 2 * not_smaller > res.trials.size();
    if (judged) pass &= good;
    detail += fmt(" %s %zu/%zu, median O %.5g N %.5g%s;", name.c_str(), not_smaller, res.trials.size(), median(fo),
                  median(fn), judged ? (good ? "" : " [fails]") : " (reported only)");
  }
  return {pass, detail};
}

Verdict ks_machinery() {
  oracle::Engine g(1005);
  std::size_t exact = 0;
  for (std::size_t k = 0; k < kKsStatPairs; ++k) {
    std::uniform_int_distribution<int> n(1, 120), v(1, 60);
    IsiSample a(static_cast<std::size_t>(n(g))), b(static_cast<std::size_t>(n(g)));
    for (auto& x : a) x = v(g);
    const int shift = static_cast<int>(g() % 8);
    for (auto& x : b) x = v(g) + shift;
    exact += ks_two_sample(a, b).statistic == oracle::ecdf_scan_ks(a, b);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < kKsPvalPairs; ++k) {
    std::uniform_int_distribution<int> v(1, 1000);
    IsiSample a(kKsPvalSize), b(kKsPvalSize);
    const int shift = static_cast<int>(g() % 120);
    for (auto& x : a) x = v(g);
    for (auto& x : b) x = v(g) + shift;
    const double p = ks_two_sample(a, b).p_value;
    const double perm = oracle::permutation_ks_p(a, b, kKsPermutations, g);
    worst = std::max(worst, std::fabs(p - perm));
  }
  return {exact == kKsStatPairs && worst <= kKsPvalTol,
          fmt("KS machinery: %zu/%zu statistics equal the ECDF scan; worst |p - permutation p| = %.4f over %zu pairs of 100 "
              "(limit %.2f)",
              exact, kKsStatPairs, worst, kKsPvalPairs, kKsPvalTol)};
}

Verdict distance_axioms() {
  oracle::Engine g(1006);
  double worst = 0.0;
  bool identity = true, symmetric = true;
  auto rel = [](double x, double y) { return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-300}); };
  for (int k = 0; k < 100; ++k) {
    const Raster a = oracle::random_raster(g, 5, 100, 0.1), b = oracle::random_raster(g, 5, 100, 0.1);
    identity &= pairwise_distance(a, a) == 0.0 && aggregate_distance(a, a) == 0.0;
    symmetric &= rel(pairwise_distance(a, b), pairwise_distance(b, a)) <= kDistanceRelTol &&
                 rel(aggregate_distance(a, b), aggregate_distance(b, a)) <= kDistanceRelTol;
    worst = std::max(worst, rel(pairwise_distance(a, b), oracle::direct_pairwise(a, b, kDefaultSigma)));
    worst = std::max(worst, rel(aggregate_distance(a, b), oracle::direct_aggregate(a, b, kDefaultSigma)));
  }
  return {identity && symmetric && worst <= kDistanceRelTol,
          fmt("kernel distance axioms: identity %s, symmetry %s, worst relative error vs direct summation %.2e "
              "(limit %.0e)",
              identity ? "holds" : "fails", symmetric ? "holds" : "fails", worst, kDistanceRelTol)};
}

Verdict power_law_fitting() {
  bool pass = true;
  std::string detail = "power-law fitting:";
  for (double tau : {1.5, 2.0, 2.5}) {
    oracle::PowerLawSampler sample(tau);
    oracle::Engine g(static_cast<std::uint64_t>(1007 + tau * 10));
    std::vector<std::int64_t> x(kPowerLawSamples);
    for (auto& v : x) v = sample(g);
    const double est = fit_power_law_mle(x);
    const bool good = std::fabs(est - tau) <= kExponentTol;
    pass &= good;
    detail += fmt(" tau %.1f -> %.4f%s;", tau, est, good ? "" : " [off]");
  }
  // Identity on a fitted synthetic avalanche set.
  oracle::PowerLawSampler dur(1.8);
  oracle::Engine g(1010);
  AvalancheSet set;
  for (int k = 0; k < 5000; ++k) {
    const std::int64_t d = std::min<std::int64_t>(dur(g), 500);
    set.avalanches.push_back({d + static_cast<std::int64_t>(g() % static_cast<std::uint64_t>(d * d)), d, 0});
  }
  const AvalancheFit fit = fit_beta(set);
  const bool identity = fit.beta_pred == (fit.alpha - 1.0) / (fit.tau - 1.0);
  const double instance = predicted_beta(1.242, 1.327);
  const bool arithmetic = std::fabs(instance - 1.351) < 5e-4;
  pass &= identity && arithmetic;
  detail += fmt(" beta_p identity %s; (1.327-1)/(1.242-1) = %.4f (expected 1.351)", identity ? "exact" : "broken", instance);
  return {pass, detail};
}

Verdict pif_criticality() {
  const auto t0 = Clock::now();
  SeededRng rng(derive_seed(1, purpose_tag("pif-network")));
  const PifNetwork net = build_pif(rng, 400);
  const Raster r = simulate_pif(net, SeededRng(derive_seed(1, purpose_tag("pif-drive"))), 50000);
  const AvalancheSet set = segment_avalanches(r);
  const AvalancheFit fit = try_fit_beta(set);
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(r.total_count()) / (400.0 * 50000.0);
  const bool pass = set.avalanches.size() >= kMinAvalanches && fit.ok && fit.beta_gap() <= kBetaGapTol && secs < kPifSeconds;
  std::string detail = fmt("PIF criticality: radius %.9f, rate %.4f spikes/step, threshold %.0f, %zu avalanches (need %zu)",
                           net.spectral_radius, rate, set.threshold, set.avalanches.size(), kMinAvalanches);
  if (fit.ok)
    detail += fmt(", tau %.3f alpha %.3f beta_p %.3f beta_o %.3f |gap| %.3f (limit %.2f)", fit.tau, fit.alpha,
                  fit.beta_pred, fit.beta_obs, fit.beta_gap(), kBetaGapTol);
  else
    detail += ", fit failed: " + fit.failure;
  detail += fmt(", %.1f s (limit %.0f s)", secs, kPifSeconds);
  return {pass, detail};
}

Verdict transfer_ordering() {
  ExperimentConfig c;
  c.experiment = "pif-transfer";
  c.n_neurons = 100;
  c.n_steps = 5000;
  c.chunks = 2;
  c.pspm.epochs = 50;
  c.trials = 3;
  c.seed = 1;
  c.pspm.delta_max = kDeskDeltaMax;
  c.pspm.homeo_unit = kDeskHomeoUnit;
  c.write_update_log = false;
  c.output_dir = scratch_dir("transfer");
  const ExperimentResult res = run_experiment(c);
  fs::remove_all(c.output_dir);

  std::size_t o_beats_n = 0, c_fits = 0;
  std::string detail = "PIF->LIF transfer |beta_o - beta_p| per run (N/O/C):";
  auto gap = [](const AvalancheFit& f) { return f.ok ? f.beta_gap() : INFINITY; };
  auto show = [](const AvalancheFit& f) { return f.ok ? fmt("%.3f", f.beta_gap()) : std::string("no power law"); };
  for (const auto& t : res.trials) {
    if (!t.ok) {
      detail += fmt(" run %zu failed (%s);", t.trial, t.error.c_str());
      continue;
    }
    const AvalancheFit &n = fit_of(t, "N"), &o = fit_of(t, "O"), &cc = fit_of(t, "C");
    const bool win = o.ok && gap(o) < gap(n);
    // Control sits between optimized and naive, or within the gap tolerance of optimized.
    const bool between = cc.ok && ((gap(cc) >= gap(o) && gap(cc) <= gap(n)) || std::fabs(gap(cc) - gap(o)) <= kBetaGapTol);
    o_beats_n += win;
    c_fits += between;
    detail += fmt(" run %zu %s/%s/%s, R %s;", t.trial, show(n).c_str(), show(o).c_str(), show(cc).c_str(),
                  show(fit_of(t, "R")).c_str());
  }
  const std::size_t runs = res.trials.size();
  detail += fmt(" optimized beats naive in %zu/%zu, control intermediate or comparable in %zu/%zu", o_beats_n, runs,
                c_fits, runs);
  return {2 * o_beats_n > runs && 2 * c_fits > runs, detail};
}

Verdict determinism() {
  bool same = true;
  std::string detail = "determinism:";
  for (const char* exp : {"lif-recovery", "pif-transfer"}) {
    ExperimentConfig c;
    c.experiment = exp;
    c.n_neurons = 30;
    c.n_steps = 600;
    c.pspm.epochs = 3;
    c.trials = 3;
    c.seed = 10;
    c.pspm.delta_max = kDeskDeltaMax;
    c.pspm.homeo_unit = kDeskHomeoUnit;
    ExperimentConfig a = c, b = c;
    a.output_dir = scratch_dir(std::string("det_a_") + exp);
    b.output_dir = scratch_dir(std::string("det_b_") + exp);
    a.parallel_trials = 1;
    b.parallel_trials = 3;
    run_experiment(a);
    run_experiment(b);
    const std::string sa = slurp(a.output_dir / "summary.csv"), sb = slurp(b.output_dir / "summary.csv");
    const bool eq = !sa.empty() && sa == sb;
    same &= eq;
    detail += fmt(" %s summary.csv %s (%zu bytes);", exp, eq ? "byte-identical" : "DIFFERS", sa.size());
    fs::remove_all(a.output_dir);
    fs::remove_all(b.output_dir);
  }
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k)
    if (std::string(argv[k]) == "--only" && k + 1 < argc) only = std::atoi(argv[++k]);

  const std::vector<std::function<Verdict()>> criteria = {
      matcher_optimality, lif_closed_form,  distance_ordering, weight_non_recovery, ks_machinery,
      distance_axioms,    power_law_fitting, pif_criticality,  transfer_ordering,   determinism};

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (only && id != only) continue;
    Verdict v;
    try {
      v = criteria[k]();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
