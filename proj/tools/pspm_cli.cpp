// pspm: run PSPM experiments, export plot tables, validate configs.
//
// Precedence: command-line flags override the config file, which overrides
// built-in defaults. Without --out or output_dir, results go under
// $PSPM_OUTPUT_ROOT (default ./results).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pspm/experiment.hpp"

namespace {

using pspm::ConfigError;
using pspm::ExperimentConfig;

ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : ExperimentConfig::load(path);
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& experiment,
            const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& trials,
            const std::optional<std::string>& out) {
  ExperimentConfig cfg = load_or_default(config_path);
  if (experiment) cfg.experiment = *experiment;
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (out) cfg.output_dir = *out;
  cfg.validate();

  const pspm::ExperimentResult res = pspm::run_experiment(cfg);
  std::cout << "wrote " << res.root.string() << " (" << res.trials.size() << " trials, " << res.failed()
            << " failed)\n";
  for (const auto& t : res.trials)
    if (!t.ok) std::cerr << "trial " << t.trial << " failed: " << t.error << '\n';
  return res.failed() == 0 ? 0 : 3;
}

int cmd_export(const std::string& tree, const std::vector<std::string>& figures) {
  const pspm::ExportReport rep = pspm::export_plotdata(tree, figures.empty() ? pspm::plot_figures() : figures);
  std::cout << "wrote " << rep.written.size() << " tables\n";
  for (const auto& m : rep.missing) std::cerr << "missing " << m << '\n';
  return rep.missing.empty() ? 0 : 4;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig cfg = ExperimentConfig::load(path);
  std::cout << cfg.to_json().dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-synaptic pool modification experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> experiment, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  auto* run = app.add_subcommand("run", "Run an experiment and write its result tree");
  run->add_option("--config", config_path, "Flat JSON config")->check(CLI::ExistingFile);
  run->add_option("--experiment", experiment, "lif-recovery or pif-transfer")
      ->check(CLI::IsMember({"lif-recovery", "pif-transfer"}));
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--trials", trials, "Number of trials");
  run->add_option("--out", out, "Output directory");

  std::string tree;
  std::vector<std::string> figures;
  auto* exp = app.add_subcommand("export", "Write plot tables from a result tree");
  exp->add_option("--in", tree, "Result tree")->required();
  exp->add_option("--figures", figures, "raster, activity, isi, distances, avalanche (default: all)")
      ->delimiter(',')
      ->check(CLI::IsMember(pspm::plot_figures()));

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check a config and print it fully resolved");
  val->add_option("--config", validate_path, "Flat JSON config")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, experiment, seed, trials, out);
    if (*exp) return cmd_export(tree, figures);
    if (*val) return cmd_validate(validate_path);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
