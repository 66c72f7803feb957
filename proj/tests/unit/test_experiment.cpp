#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pspm/experiment.hpp"
#include "pspm/io.hpp"
#include "pspm/metrics.hpp"

using namespace pspm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pspm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> table(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream is(p);
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; ss >> c;) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig smoke(const fs::path& out) {
  ExperimentConfig c;
  c.trials = 1;
  c.n_neurons = 20;
  c.n_steps = 500;
  c.pspm.epochs = 2;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config parsing converts units and rejects bad input") {
  const auto j = nlohmann::json::parse(R"({"experiment": "pif-transfer", "tau_ms": 20, "v_th_mv": 25,
      "r_m_mohm": 50, "dt_ms": 2, "current_mean_na": 0.3, "delta_max_v": 1e-6, "n_neurons": 40})");
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.experiment == "pif-transfer");
  CHECK(c.neuron.tau == doctest::Approx(0.02));
  CHECK(c.neuron.v_th == doctest::Approx(0.025));
  CHECK(c.neuron.r_m == doctest::Approx(5e7));
  CHECK(c.current.mean == doctest::Approx(3e-10));
  CHECK(c.pspm.delta_max == 1e-6);
  CHECK(c.n_neurons == 40);

  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  auto field_of = [](const char* text) -> std::string {
    try {
      ExperimentConfig::from_json(nlohmann::json::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of(R"({"n_neuron": 10})") == "n_neuron");
  CHECK(field_of(R"({"experiment": "other"})") == "experiment");
  CHECK(field_of(R"({"init": "lognormal"})") == "init");
  CHECK(field_of(R"({"trials": -1})") == "trials");
  CHECK(field_of(R"({"trials": 2.5})") == "trials");
  CHECK(field_of(R"({"tau_ms": "thirty"})") == "tau_ms");
  CHECK(field_of(R"({"delta_max_v": 0})") == "delta_max_v");
  CHECK(field_of(R"({"pif_connection_prob": 0})") == "pif_connection_prob");
  CHECK(field_of(R"([1, 2])") == "<root>");
}

TEST_CASE("output root from the environment") {
  ExperimentConfig c;
  c.seed = 5;
  ::setenv(kOutputRootEnv, "/tmp/somewhere", 1);
  CHECK(default_output_dir(c) == fs::path("/tmp/somewhere/lif-recovery-seed5"));
  ::unsetenv(kOutputRootEnv);
  CHECK(default_output_dir(c) == fs::path("results/lif-recovery-seed5"));
}

TEST_CASE("smoke run produces one trial and three summary rows") {
  const fs::path out = scratch("smoke");
  const ExperimentResult res = run_experiment(smoke(out));
  CHECK(res.failed() == 0);
  std::size_t trial_dirs = 0;
  for (const auto& e : fs::directory_iterator(out)) trial_dirs += e.is_directory();
  CHECK(trial_dirs == 1);
  for (const char* f : {"reference.raster", "naive.raster", "optimized.raster", "control.raster", "w_reference.csv",
                        "w_naive.csv", "w_optimized.csv", "w_control.csv", "updates.csv", "trial.json", "epochs.csv"})
    CHECK(fs::exists(out / "trial_000" / f));
  const std::string summary = slurp(out / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
  CHECK(summary.find("\n0,N,") != std::string::npos);
  CHECK(summary.find("\n0,O,") != std::string::npos);
  CHECK(summary.find("\n0,C,") != std::string::npos);

  const ExperimentConfig resolved = ExperimentConfig::load(out / "resolved_config.json");
  CHECK(resolved.to_json() == smoke(out).to_json());
  CHECK(read_raster(out / "trial_000" / "optimized.raster").n_steps() == 500);
  fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical regardless of trial parallelism") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ExperimentConfig ca = smoke(a);
  ca.trials = 3;
  ca.parallel_trials = 1;
  ExperimentConfig cb = ca;
  cb.output_dir = b;
  cb.parallel_trials = 3;
  run_experiment(ca);
  run_experiment(cb);
  for (const char* f : {"summary.csv", "metrics.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "trial_002" / "updates.csv") == slurp(b / "trial_002" / "updates.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("update log can be switched off") {
  const fs::path out = scratch("nolog");
  ExperimentConfig c = smoke(out);
  c.write_update_log = false;
  run_experiment(c);
  CHECK(!fs::exists(out / "trial_000" / "updates.csv"));
  CHECK(fs::exists(out / "summary.csv"));
  fs::remove_all(out);
}

TEST_CASE("pif-transfer tree") {
  const fs::path out = scratch("transfer");
  ExperimentConfig c = smoke(out);
  c.experiment = "pif-transfer";
  c.n_neurons = 30;
  c.n_steps = 400;
  c.chunks = 2;
  run_experiment(c);
  CHECK(read_raster(out / "trial_000" / "optimized.raster").n_steps() == 800);
  CHECK(read_raster(out / "trial_000" / "reference.raster").n_steps() == 800);
  CHECK(fs::exists(out / "trial_000" / "w_pif.csv"));
  CHECK(fs::exists(out / "trial_000" / "w_optimized_c1.csv"));
  const std::string av = slurp(out / "avalanche.csv");
  for (const char* net : {"\n0,R,", "\n0,N,", "\n0,O,", "\n0,C,"}) CHECK(av.find(net) != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("plot export") {
  const fs::path out = scratch("export");
  run_experiment(smoke(out));
  const ExportReport rep = export_plotdata(out, plot_figures());
  CHECK(rep.missing.empty());

  const Raster ref = read_raster(out / "trial_000" / "reference.raster");
  const auto act = table(out / "plotdata" / "activity_trial_000_R.tsv");
  const ActivitySignal a = total_activity_signal(ref);
  REQUIRE(act.size() == a.values.size());
  for (std::size_t t = 0; t < act.size(); ++t) CHECK(std::stod(act[t][1]) == a.values[t]);

  std::size_t total = 0;
  for (const auto& row : table(out / "plotdata" / "isi_trial_000_O.tsv")) total += std::stoul(row[1]);
  CHECK(total == isi(read_raster(out / "trial_000" / "optimized.raster")).size());

  for (const char* f : {"avalanche_trial_000_R.tsv", "avalanche_trial_000_R_scaling.tsv",
                        "avalanche_trial_000_R_size_survival.tsv"})
    for (const auto& row : table(out / "plotdata" / f))
      for (const auto& cell : row) CHECK(std::stod(cell) > 0.0);

  CHECK(table(out / "plotdata" / "distances.tsv").size() == 3);

  fs::remove(out / "trial_000" / "control.raster");
  const ExportReport partial = export_plotdata(out, {"raster"});
  REQUIRE(partial.missing.size() == 1);
  CHECK(partial.missing[0].find("control.raster") != std::string::npos);
  CHECK_THROWS_AS(export_plotdata(out, {"heatmap"}), std::invalid_argument);
  fs::remove_all(out);
}

TEST_CASE("a failing trial is recorded while others proceed") {
  const fs::path out = scratch("fail");
  ExperimentConfig c = smoke(out);
  c.trials = 2;
  // Overflowing drive makes every trial fail inside the simulator.
  c.current.mean = 1e305;
  c.current.sigma = 0.0;
  const ExperimentResult res = run_experiment(c);
  CHECK(res.failed() == 2);
  const std::string fails = slurp(out / "failures.csv");
  CHECK(fails.find("\n0,") != std::string::npos);
  CHECK(fails.find("\n1,") != std::string::npos);
  CHECK(!fs::exists(out / "trial_000"));
  fs::remove_all(out);
}
