#include "pspm/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "pspm/avalanche.hpp"
#include "pspm/io.hpp"
#include "pspm/metrics.hpp"
#include "pspm/pif.hpp"

namespace pspm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Unit scale from a JSON key's suffix to SI.
constexpr double kMs = 1e-3;
constexpr double kMv = 1e-3;
constexpr double kMohm = 1e6;
constexpr double kNa = 1e-9;

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "init", "n_neurons", "n_steps", "trials", "seed", "output_dir",
      "a_cap", "z", "delta_max_v", "homeo_unit_v", "epochs",
      "tau_ms", "r_m_mohm", "v_th_mv", "dt_ms", "inhibitory_fraction",
      "current_mean_na", "current_sd_na",
      "chunks", "pif_connection_prob", "pif_weight_max", "pif_input_mean", "pif_input_scale",
      "transfer_naive_max_mv",
      "avalanche_percentile", "sigma_steps", "isi_bin", "write_update_log", "parallel_trials"};
  return keys;
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
  throw ConfigError(key, "expected a nonnegative integer");
}

double get_real(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string trial_name(std::size_t t) {
  std::string s = std::to_string(t);
  return "trial_" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

NetworkMetrics compare(const std::string& name, const Raster& x, const Raster& r, const IsiSample& isi_r,
                       const ExperimentConfig& cfg) {
  NetworkMetrics m;
  m.network = name;
  const double sigma = cfg.kernel_sigma();
  m.d_p = pairwise_distance(x, r, sigma);
  m.d_a = aggregate_distance(x, r, sigma);
  const IsiSample isi_x = isi(x);
  if (!isi_x.empty() && !isi_r.empty()) {
    const KsResult ks = ks_two_sample(isi_x, isi_r);
    m.ks_stat = ks.statistic;
    m.ks_p = ks.p_value;
  } else {
    m.ks_stat = isi_x.empty() && isi_r.empty() ? 0.0 : 1.0;
    m.ks_p = isi_x.empty() && isi_r.empty() ? 1.0 : 0.0;
  }
  m.isi_l2 = isi_x.empty() || isi_r.empty() ? (isi_x.empty() == isi_r.empty() ? 0.0 : 1.0)
                                            : isi_hist_l2(isi_x, isi_r, cfg.isi_bin);
  const SpikeStats st = spike_stats(x);
  m.mean_count = st.mean_count;
  m.var_count = st.var_count;
  return m;
}

void write_update_log(std::ostream& os, const std::vector<UpdateLogEntry>& log, std::optional<std::size_t> chunk) {
  for (const auto& e : log) {
    if (chunk) os << *chunk << ',';
    os << e.epoch << ',' << e.post << ',' << e.pre << ',' << format_double(e.delta) << ',' << to_string(e.kind) << '\n';
  }
}

void write_epoch_stats(std::ostream& os, const std::vector<EpochStats>& stats, std::optional<std::size_t> chunk) {
  for (const auto& s : stats) {
    if (chunk) os << *chunk << ',';
    os << s.epoch << ',' << s.ref_spikes << ',' << s.obs_spikes << ',' << s.unpaired_ref << ',' << s.unpaired_obs
       << ',' << s.local_updates << ',' << s.control_updates << ',' << format_double(s.local_abs_delta) << ','
       << format_double(s.control_abs_delta) << ',' << s.pairing_cost << '\n';
  }
}

constexpr const char* kEpochHeader =
    "epoch,ref_spikes,obs_spikes,unpaired_ref,unpaired_obs,local_updates,control_updates,local_abs_delta,"
    "control_abs_delta,pairing_cost\n";

void write_dense(const fs::path& path, const std::vector<double>& w, std::size_t n) {
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << format_double(w[i * n + j]);
    os << '\n';
  }
  write_text(path, os.str());
}

AvalancheRow avalanche_row(const std::string& name, const Raster& r, double percentile) {
  const AvalancheSet set = segment_avalanches(r, percentile);
  return {name, set.threshold, try_fit_beta(set)};
}

json trial_json(std::size_t trial, const json& seeds, const ExperimentConfig& cfg) {
  json j;
  j["trial"] = trial;
  j["seeds"] = seeds;
  j["params"] = cfg.to_json();
  return j;
}

// Writes one lif-recovery trial into `dir` and returns its metrics.
TrialOutcome lif_trial(const ExperimentConfig& cfg, std::size_t t, const fs::path& dir) {
  const std::uint64_t trial_seed = derive_seed(cfg.seed, t, purpose_tag("trial"));
  const std::uint64_t net_seed = derive_seed(trial_seed, purpose_tag("networks"));
  const std::uint64_t cur_seed = derive_seed(trial_seed, purpose_tag("currents"));
  const std::uint64_t pspm_seed = derive_seed(trial_seed, purpose_tag("pspm"));

  SeededRng net_rng(net_seed);
  const TrialNetworks nets =
      init_trial(InitConfig::from_name(cfg.init), net_rng, cfg.n_neurons, cfg.neuron.inhibitory_fraction);
  SeededRng cur_rng(cur_seed);
  const InputCurrents currents = gen_currents(cur_rng, cfg.n_neurons, cfg.n_steps, cfg.current);
  const Raster ref = simulate_lif(nets.reference, cfg.neuron, currents);
  const PspmRun run =
      run_pspm(ref, nets.naive, nets.control, currents, cfg.pspm, cfg.neuron, pspm_seed, {cfg.write_update_log});

  write_raster(dir / "reference.raster", ref);
  write_raster(dir / "naive.raster", run.naive_raster);
  write_raster(dir / "optimized.raster", run.optimized_raster);
  write_raster(dir / "control.raster", run.control_raster);
  write_weights(dir / "w_reference.csv", nets.reference);
  write_weights(dir / "w_naive.csv", nets.naive);
  write_weights(dir / "w_optimized.csv", run.optimized);
  write_weights(dir / "w_control.csv", run.control);
  if (cfg.write_update_log) {
    std::ostringstream os;
    os << "epoch,i,j,delta,kind\n";
    write_update_log(os, run.log, std::nullopt);
    write_text(dir / "updates.csv", os.str());
  }
  {
    std::ostringstream os;
    os << kEpochHeader;
    write_epoch_stats(os, run.epochs, std::nullopt);
    write_text(dir / "epochs.csv", os.str());
  }
  const json seeds = {{"trial", trial_seed}, {"networks", net_seed}, {"currents", cur_seed}, {"pspm", pspm_seed}};
  write_text(dir / "trial.json", trial_json(t, seeds, cfg).dump(2) + "\n");

  TrialOutcome out;
  out.trial = t;
  const IsiSample isi_r = isi(ref);
  const std::pair<const char*, const Raster*> rasters[] = {
      {"N", &run.naive_raster}, {"O", &run.optimized_raster}, {"C", &run.control_raster}};
  const WeightMatrix* weights[] = {&nets.naive, &run.optimized, &run.control};
  for (std::size_t k = 0; k < 3; ++k) {
    NetworkMetrics m = compare(rasters[k].first, *rasters[k].second, ref, isi_r, cfg);
    m.frob_reference = weight_frobenius(*weights[k], nets.reference);
    m.frob_naive = weight_frobenius(*weights[k], nets.naive);
    out.metrics.push_back(std::move(m));
  }
  out.ok = true;
  return out;
}

// One pif-transfer run: a fresh PIF reference, split into chunks, each
// learned from the same naive LIF network with its own currents.
TrialOutcome transfer_trial(const ExperimentConfig& cfg, std::size_t t, const fs::path& dir) {
  const std::uint64_t trial_seed = derive_seed(cfg.seed, t, purpose_tag("trial"));
  const std::uint64_t pif_seed = derive_seed(trial_seed, purpose_tag("pif-network"));
  const std::uint64_t drive_seed = derive_seed(trial_seed, purpose_tag("pif-drive"));
  const std::uint64_t naive_seed = derive_seed(trial_seed, purpose_tag("naive-weights"));
  const std::size_t n = cfg.n_neurons;

  SeededRng pif_rng(pif_seed);
  const PifNetwork pif = build_pif(pif_rng, n, cfg.pif_connection_prob, {0.0, cfg.pif_weight_max});
  const Raster ref = simulate_pif(pif, SeededRng(drive_seed), cfg.n_steps * cfg.chunks,
                                  PifDrive::poisson(cfg.pif_input_mean, cfg.pif_input_scale));
  const std::vector<Raster> parts = split_raster(ref, cfg.chunks);

  SeededRng naive_rng(naive_seed);
  const std::vector<NeuronClass> classes(n, NeuronClass::excitatory);
  const WeightMatrix naive = draw_weights(naive_rng, classes, Magnitude::uniform(0.0, cfg.transfer_naive_max));

  std::vector<Raster> n_parts, o_parts, c_parts;
  double frob_o = 0.0, frob_c = 0.0;
  std::ostringstream log, epochs;
  log << "chunk,epoch,i,j,delta,kind\n";
  epochs << "chunk," << kEpochHeader;
  json chunk_seeds = json::array();
  for (std::size_t c = 0; c < cfg.chunks; ++c) {
    const std::uint64_t cur_seed = derive_seed(trial_seed, c, purpose_tag("currents"));
    const std::uint64_t pspm_seed = derive_seed(trial_seed, c, purpose_tag("pspm"));
    chunk_seeds.push_back({{"currents", cur_seed}, {"pspm", pspm_seed}});
    SeededRng cur_rng(cur_seed);
    const InputCurrents currents = gen_currents(cur_rng, n, cfg.n_steps, cfg.current);
    PspmRun run = run_pspm(parts[c], naive, naive, currents, cfg.pspm, cfg.neuron, pspm_seed, {cfg.write_update_log});
    frob_o += weight_frobenius(run.optimized, naive);
    frob_c += weight_frobenius(run.control, naive);
    const std::string suffix = "_c" + std::to_string(c) + ".csv";
    write_weights(dir / ("w_optimized" + suffix), run.optimized);
    write_weights(dir / ("w_control" + suffix), run.control);
    if (cfg.write_update_log) write_update_log(log, run.log, c);
    write_epoch_stats(epochs, run.epochs, c);
    n_parts.push_back(std::move(run.naive_raster));
    o_parts.push_back(std::move(run.optimized_raster));
    c_parts.push_back(std::move(run.control_raster));
  }
  const Raster nr = concat_rasters(n_parts);
  const Raster orr = concat_rasters(o_parts);
  const Raster cr = concat_rasters(c_parts);

  write_raster(dir / "reference.raster", ref);
  write_raster(dir / "naive.raster", nr);
  write_raster(dir / "optimized.raster", orr);
  write_raster(dir / "control.raster", cr);
  write_dense(dir / "w_pif.csv", pif.w, n);
  write_weights(dir / "w_naive.csv", naive);
  if (cfg.write_update_log) write_text(dir / "updates.csv", log.str());
  write_text(dir / "epochs.csv", epochs.str());
  json seeds = {{"trial", trial_seed}, {"pif_network", pif_seed}, {"pif_drive", drive_seed},
                {"naive_weights", naive_seed}, {"chunks", chunk_seeds}};
  json tj = trial_json(t, seeds, cfg);
  tj["pif_spectral_radius"] = pif.spectral_radius;
  tj["pif_raw_spectral_radius"] = pif.raw_spectral_radius;
  write_text(dir / "trial.json", tj.dump(2) + "\n");

  TrialOutcome out;
  out.trial = t;
  const IsiSample isi_r = isi(ref);
  const double k = static_cast<double>(cfg.chunks);
  const std::tuple<const char*, const Raster*, double> rows[] = {
      {"N", &nr, 0.0}, {"O", &orr, frob_o / k}, {"C", &cr, frob_c / k}};
  for (const auto& [name, r, frob] : rows) {
    NetworkMetrics m = compare(name, *r, ref, isi_r, cfg);
    m.frob_naive = frob;
    out.metrics.push_back(std::move(m));
  }
  const std::pair<const char*, const Raster*> all[] = {{"R", &ref}, {"N", &nr}, {"O", &orr}, {"C", &cr}};
  for (const auto& [name, r] : all) out.avalanches.push_back(avalanche_row(name, *r, cfg.avalanche_percentile));
  out.ok = true;
  return out;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void write_tables(const fs::path& root, const ExperimentConfig& cfg, const std::vector<TrialOutcome>& trials) {
  std::ostringstream summary, metrics, failures;
  summary << "trial,network,d_p,d_a,ks_stat,ks_p,isi_l2,mean_count,var_count,frob_reference,frob_naive\n";
  metrics << "trial,network,metric,value\n";
  failures << "trial,error\n";
  for (const auto& t : trials) {
    if (!t.ok) {
      failures << t.trial << ',' << csv_escape(t.error) << '\n';
      continue;
    }
    for (const auto& m : t.metrics) {
      summary << t.trial << ',' << m.network << ',' << format_double(m.d_p) << ',' << format_double(m.d_a) << ','
              << format_double(m.ks_stat) << ',' << format_double(m.ks_p) << ',' << format_double(m.isi_l2) << ','
              << format_double(m.mean_count) << ',' << format_double(m.var_count) << ','
              << opt_double(m.frob_reference) << ',' << format_double(m.frob_naive) << '\n';
      const std::pair<const char*, std::optional<double>> long_rows[] = {
          {"d_p", m.d_p}, {"d_a", m.d_a}, {"ks_stat", m.ks_stat}, {"ks_p", m.ks_p},
          {"isi_l2", m.isi_l2}, {"mean_count", m.mean_count}, {"var_count", m.var_count},
          {"frob_reference", m.frob_reference}, {"frob_naive", m.frob_naive}};
      for (const auto& [name, v] : long_rows)
        if (v) metrics << t.trial << ',' << m.network << ',' << name << ',' << format_double(*v) << '\n';
    }
  }
  write_text(root / "summary.csv", summary.str());
  write_text(root / "metrics.csv", metrics.str());
  write_text(root / "failures.csv", failures.str());

  if (cfg.experiment != "pif-transfer") return;
  std::ostringstream av;
  av << "trial,network,count,threshold,tau,alpha,beta_pred,beta_obs,beta_gap,ok,failure\n";
  for (const auto& t : trials) {
    for (const auto& row : t.avalanches) {
      const AvalancheFit& f = row.fit;
      av << t.trial << ',' << row.network << ',' << f.count << ',' << format_double(row.threshold) << ',';
      if (f.ok) {
        av << format_double(f.tau) << ',' << format_double(f.alpha) << ',' << format_double(f.beta_pred) << ','
           << format_double(f.beta_obs) << ',' << format_double(f.beta_gap()) << ",1,\n";
      } else {
        av << ",,,,,0," << csv_escape(f.failure) << '\n';
      }
    }
  }
  write_text(root / "avalanche.csv", av.str());
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  const auto& keys = known_keys();
  for (const auto& item : j.items())
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) throw ConfigError(item.key(), "unknown key");

  ExperimentConfig c;
  auto has = [&](const char* k) { return j.contains(k); };
  if (has("experiment")) c.experiment = get_as<std::string>(j, "experiment");
  if (has("init")) c.init = get_as<std::string>(j, "init");
  if (has("n_neurons")) c.n_neurons = get_count(j, "n_neurons");
  if (has("n_steps")) c.n_steps = get_count(j, "n_steps");
  if (has("trials")) c.trials = get_count(j, "trials");
  if (has("seed")) c.seed = get_count(j, "seed");
  if (has("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
  if (has("a_cap")) c.pspm.a_cap = static_cast<std::int64_t>(get_count(j, "a_cap"));
  if (has("z")) c.pspm.z = static_cast<std::int64_t>(get_count(j, "z"));
  if (has("delta_max_v")) c.pspm.delta_max = get_real(j, "delta_max_v");
  if (has("homeo_unit_v")) c.pspm.homeo_unit = get_real(j, "homeo_unit_v");
  if (has("epochs")) c.pspm.epochs = get_count(j, "epochs");
  if (has("tau_ms")) c.neuron.tau = get_real(j, "tau_ms") * kMs;
  if (has("r_m_mohm")) c.neuron.r_m = get_real(j, "r_m_mohm") * kMohm;
  if (has("v_th_mv")) c.neuron.v_th = get_real(j, "v_th_mv") * kMv;
  if (has("dt_ms")) c.neuron.dt = get_real(j, "dt_ms") * kMs;
  if (has("inhibitory_fraction")) c.neuron.inhibitory_fraction = get_real(j, "inhibitory_fraction");
  if (has("current_mean_na")) c.current.mean = get_real(j, "current_mean_na") * kNa;
  if (has("current_sd_na")) c.current.sigma = get_real(j, "current_sd_na") * kNa;
  if (has("chunks")) c.chunks = get_count(j, "chunks");
  if (has("pif_connection_prob")) c.pif_connection_prob = get_real(j, "pif_connection_prob");
  if (has("pif_weight_max")) c.pif_weight_max = get_real(j, "pif_weight_max");
  if (has("pif_input_mean")) c.pif_input_mean = get_real(j, "pif_input_mean");
  if (has("pif_input_scale")) c.pif_input_scale = get_real(j, "pif_input_scale");
  if (has("transfer_naive_max_mv")) c.transfer_naive_max = get_real(j, "transfer_naive_max_mv") * kMv;
  if (has("avalanche_percentile")) c.avalanche_percentile = get_real(j, "avalanche_percentile");
  if (has("sigma_steps")) c.sigma = get_real(j, "sigma_steps");
  if (has("isi_bin")) c.isi_bin = static_cast<std::int64_t>(get_count(j, "isi_bin"));
  if (has("write_update_log")) c.write_update_log = get_as<bool>(j, "write_update_log");
  if (has("parallel_trials")) c.parallel_trials = get_count(j, "parallel_trials");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["init"] = init;
  j["n_neurons"] = n_neurons;
  j["n_steps"] = n_steps;
  j["trials"] = trials;
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  j["a_cap"] = pspm.a_cap;
  j["z"] = pspm.z;
  j["delta_max_v"] = pspm.delta_max;
  j["homeo_unit_v"] = pspm.homeo_unit;
  j["epochs"] = pspm.epochs;
  j["tau_ms"] = neuron.tau / kMs;
  j["r_m_mohm"] = neuron.r_m / kMohm;
  j["v_th_mv"] = neuron.v_th / kMv;
  j["dt_ms"] = neuron.dt / kMs;
  j["inhibitory_fraction"] = neuron.inhibitory_fraction;
  j["current_mean_na"] = current.mean / kNa;
  j["current_sd_na"] = current.sigma / kNa;
  j["chunks"] = chunks;
  j["pif_connection_prob"] = pif_connection_prob;
  j["pif_weight_max"] = pif_weight_max;
  j["pif_input_mean"] = pif_input_mean;
  j["pif_input_scale"] = pif_input_scale;
  j["transfer_naive_max_mv"] = transfer_naive_max / kMv;
  j["avalanche_percentile"] = avalanche_percentile;
  j["sigma_steps"] = kernel_sigma();
  j["isi_bin"] = isi_bin;
  j["write_update_log"] = write_update_log;
  j["parallel_trials"] = parallel_trials;
  return j;
}

void ExperimentConfig::validate() const {
  if (experiment != "lif-recovery" && experiment != "pif-transfer")
    throw ConfigError("experiment", "expected lif-recovery or pif-transfer, got '" + experiment + "'");
  const auto& names = InitConfig::names();
  if (std::find(names.begin(), names.end(), init) == names.end())
    throw ConfigError("init", "unknown initial configuration '" + init + "'");
  if (n_neurons < 2) throw ConfigError("n_neurons", "need at least 2 neurons");
  if (n_steps < 1) throw ConfigError("n_steps", "must be positive");
  if (trials < 1) throw ConfigError("trials", "must be positive");
  if (pspm.a_cap < 1) throw ConfigError("a_cap", "must be positive");
  if (pspm.z < 1) throw ConfigError("z", "must be positive");
  if (!(pspm.delta_max > 0)) throw ConfigError("delta_max_v", "must be positive");
  if (!(pspm.homeo_unit > 0)) throw ConfigError("homeo_unit_v", "must be positive");
  if (!(neuron.tau > 0)) throw ConfigError("tau_ms", "must be positive");
  if (!(neuron.r_m > 0)) throw ConfigError("r_m_mohm", "must be positive");
  if (!(neuron.v_th > 0)) throw ConfigError("v_th_mv", "must be positive");
  if (!(neuron.dt > 0) || neuron.dt > neuron.tau) throw ConfigError("dt_ms", "must lie in (0, tau]");
  if (!(neuron.inhibitory_fraction >= 0 && neuron.inhibitory_fraction <= 1))
    throw ConfigError("inhibitory_fraction", "must lie in [0, 1]");
  if (!(current.sigma >= 0)) throw ConfigError("current_sd_na", "must be nonnegative");
  if (chunks < 1) throw ConfigError("chunks", "must be positive");
  if (!(pif_connection_prob > 0 && pif_connection_prob <= 1))
    throw ConfigError("pif_connection_prob", "must lie in (0, 1]");
  if (!(pif_weight_max > 0)) throw ConfigError("pif_weight_max", "must be positive");
  if (!(pif_input_mean >= 0)) throw ConfigError("pif_input_mean", "must be nonnegative");
  if (!(pif_input_scale >= 0)) throw ConfigError("pif_input_scale", "must be nonnegative");
  if (!(transfer_naive_max > 0)) throw ConfigError("transfer_naive_max_mv", "must be positive");
  if (!(avalanche_percentile >= 0 && avalanche_percentile <= 100))
    throw ConfigError("avalanche_percentile", "must lie in [0, 100]");
  if (!(sigma >= 0)) throw ConfigError("sigma_steps", "must be nonnegative");
  if (isi_bin < 1) throw ConfigError("isi_bin", "must be positive");
}

double ExperimentConfig::kernel_sigma() const { return sigma > 0 ? sigma : kDefaultSigma; }

fs::path default_output_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv(kOutputRootEnv);
  const fs::path root = env && *env ? fs::path(env) : fs::path("results");
  return root / (cfg.experiment + "-seed" + std::to_string(cfg.seed));
}

std::size_t ExperimentResult::failed() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.ok; }));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig cfg = config;
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_dir(cfg);
  const fs::path root = cfg.output_dir;
  fs::create_directories(root);
  write_text(root / "resolved_config.json", cfg.to_json().dump(2) + "\n");

  const bool transfer = cfg.experiment == "pif-transfer";
  std::vector<TrialOutcome> outcomes(cfg.trials);
  const int threads = cfg.parallel_trials ? static_cast<int>(cfg.parallel_trials) : omp_get_max_threads();
  const auto n_trials = static_cast<std::int64_t>(cfg.trials);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t t = 0; t < n_trials; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const fs::path final_dir = root / trial_name(ti);
    const fs::path tmp_dir = root / ("." + trial_name(ti) + ".tmp");
    try {
      std::error_code ec;
      fs::remove_all(tmp_dir, ec);
      fs::create_directories(tmp_dir);
      outcomes[ti] = transfer ? transfer_trial(cfg, ti, tmp_dir) : lif_trial(cfg, ti, tmp_dir);
      fs::remove_all(final_dir, ec);
      fs::rename(tmp_dir, final_dir);
    } catch (const std::exception& e) {
      std::error_code ec;
      fs::remove_all(tmp_dir, ec);
      outcomes[ti] = TrialOutcome{ti, false, e.what(), {}, {}};
    }
  }

  write_tables(root, cfg, outcomes);
  return {root, std::move(outcomes)};
}

// ---------------------------------------------------------------------------
// Plot-data export

const std::vector<std::string>& plot_figures() {
  static const std::vector<std::string> figs = {"raster", "activity", "isi", "distances", "avalanche"};
  return figs;
}

namespace {

const std::pair<const char*, const char*> kRasterFiles[] = {
    {"R", "reference.raster"}, {"N", "naive.raster"}, {"O", "optimized.raster"}, {"C", "control.raster"}};

std::vector<fs::path> trial_dirs(const fs::path& tree) {
  std::vector<fs::path> dirs;
  if (!fs::is_directory(tree)) return dirs;
  for (const auto& e : fs::directory_iterator(tree)) {
    const std::string name = e.path().filename().string();
    if (e.is_directory() && name.rfind("trial_", 0) == 0) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

class Exporter {
 public:
  Exporter(fs::path tree, ExperimentConfig cfg, ExportReport& report)
      : tree_(std::move(tree)), out_(tree_ / "plotdata"), cfg_(std::move(cfg)), report_(report) {
    fs::create_directories(out_);
  }

  void per_raster(const char* figure, void (Exporter::*fn)(const std::string&, const Raster&)) {
    const auto dirs = trial_dirs(tree_);
    if (dirs.empty()) report_.missing.push_back(figure + std::string(": no trial directories in ") + tree_.string());
    for (const auto& dir : dirs) {
      for (const auto& [net, file] : kRasterFiles) {
        const fs::path p = dir / file;
        if (!fs::exists(p)) {
          report_.missing.push_back(figure + std::string(": ") + p.string());
          continue;
        }
        Raster r = read_raster(p);
        (this->*fn)(std::string(figure) + "_" + dir.filename().string() + "_" + net, r);
      }
    }
  }

  void raster(const std::string& stem, const Raster& r) {
    std::ostringstream os;
    os << "# step neuron\n";
    for (std::size_t t = 0; t < r.n_steps(); ++t)
      for (std::size_t i = 0; i < r.n_neurons(); ++i)
        if (r.spike(i, t)) os << t << ' ' << i << '\n';
    emit(stem, os.str());
  }

  void activity(const std::string& stem, const Raster& r) {
    const ActivitySignal a = total_activity_signal(r, cfg_.kernel_sigma());
    std::ostringstream os;
    os << "# step activity\n";
    for (std::size_t t = 0; t < a.values.size(); ++t) os << t << ' ' << format_double(a.values[t]) << '\n';
    emit(stem, os.str());
  }

  void isi_table(const std::string& stem, const Raster& r) {
    std::ostringstream os;
    os << "# interval count\n";
    for (const auto& [lo, n] : isi_histogram(isi(r), cfg_.isi_bin)) os << lo << ' ' << n << '\n';
    emit(stem, os.str());
  }

  void avalanche(const std::string& stem, const Raster& r) {
    const AvalancheSet set = segment_avalanches(r, cfg_.avalanche_percentile);
    std::ostringstream list;
    list << "# size duration\n";
    std::map<std::int64_t, std::pair<double, std::size_t>> by_duration;
    std::vector<std::int64_t> sizes, durations;
    for (const auto& a : set.avalanches) {
      list << a.size << ' ' << a.duration << '\n';
      auto& acc = by_duration[a.duration];
      acc.first += static_cast<double>(a.size);
      ++acc.second;
      sizes.push_back(a.size);
      durations.push_back(a.duration);
    }
    emit(stem, list.str());

    std::ostringstream scaling;
    scaling << "# duration mean_size\n";
    for (const auto& [d, acc] : by_duration)
      scaling << d << ' ' << format_double(acc.first / static_cast<double>(acc.second)) << '\n';
    emit(stem + "_scaling", scaling.str());
    emit(stem + "_size_survival", survival(sizes));
    emit(stem + "_duration_survival", survival(durations));
  }

  void distances() {
    const fs::path p = tree_ / "summary.csv";
    std::ifstream is(p);
    if (!is) {
      report_.missing.push_back("distances: " + p.string());
      return;
    }
    std::string line;
    std::getline(is, line);
    std::ostringstream os;
    os << "# network d_p d_a\n";
    while (std::getline(is, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() < 4) {
        report_.missing.push_back("distances: malformed row in " + p.string());
        continue;
      }
      os << f[1] << ' ' << f[2] << ' ' << f[3] << '\n';
    }
    emit("distances", os.str());
  }

 private:
  static std::string survival(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    std::ostringstream os;
    os << "# value survival\n";
    const double n = static_cast<double>(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
      if (k == 0 || v[k] != v[k - 1]) os << v[k] << ' ' << format_double(static_cast<double>(v.size() - k) / n) << '\n';
    return os.str();
  }

  void emit(const std::string& stem, const std::string& text) {
    const fs::path p = out_ / (stem + ".tsv");
    write_text(p, text);
    report_.written.push_back(p);
  }

  fs::path tree_;
  fs::path out_;
  ExperimentConfig cfg_;
  ExportReport& report_;
};

}  // namespace

ExportReport export_plotdata(const fs::path& tree, const std::vector<std::string>& figures) {
  for (const auto& f : figures) {
    const auto& known = plot_figures();
    if (std::find(known.begin(), known.end(), f) == known.end())
      throw std::invalid_argument("unknown figure '" + f + "'");
  }
  ExportReport report;
  ExperimentConfig cfg;
  const fs::path cfg_path = tree / "resolved_config.json";
  if (fs::exists(cfg_path)) {
    cfg = ExperimentConfig::load(cfg_path);
  } else {
    report.missing.push_back("config: " + cfg_path.string());
  }
  if (!fs::is_directory(tree)) {
    report.missing.push_back("tree: " + tree.string());
    return report;
  }
  Exporter ex(tree, cfg, report);
  for (const auto& f : figures) {
    if (f == "raster") ex.per_raster("raster", &Exporter::raster);
    if (f == "activity") ex.per_raster("activity", &Exporter::activity);
    if (f == "isi") ex.per_raster("isi", &Exporter::isi_table);
    if (f == "avalanche") ex.per_raster("avalanche", &Exporter::avalanche);
    if (f == "distances") ex.distances();
  }
  return report;
}

}  // namespace pspm
