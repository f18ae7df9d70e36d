#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "nsopt/error.hpp"

namespace cli = nsopt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Nonstationary newsvendor experiments with adaptive restarts"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string grid;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--detect-grid", grid, "Restart-test split candidates")
      ->check(CLI::IsMember({"all", "geometric"}));
  app.add_option("--seed", seed, "Base seed");
  app.add_option("--out", out, "Output directory");
  std::size_t workers = 0;
  app.add_option("--workers", workers, "Worker threads (0: all cores)");

  auto* simulate = app.add_subcommand("simulate", "Run policies on a synthetic instance");
  std::string config_path;
  simulate->add_option("--config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* replay = app.add_subcommand("replay", "Replay a demand dataset");
  std::string data;
  std::vector<std::string> replay_policies{"nsaa", "saa", "msaa", "rsaa"};
  double ratio = 0.7;
  double h = 1.0;
  double kappa = 1.0;
  double delta = 0.1;
  replay->add_option("--data", data, "CSV with 'value' or 'date,value' rows")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--policy", replay_policies, "Policies")->delimiter(',');
  replay->add_option("--ratio", ratio, "Critical ratio b/(h+b)")->required();
  replay->add_option("--h", h, "Overage cost");
  replay->add_option("--kappa", kappa, "Baseline window scale");
  replay->add_option("--delta", delta, "Restart-test confidence");

  auto* sweep = app.add_subcommand("sweep", "Fit the regret growth exponent");
  std::string family;
  double budget = 4.0;
  std::vector<std::size_t> horizons;
  std::size_t seeds = 50;
  std::vector<std::string> sweep_policies{"nsaa"};
  double sweep_ratio = 0.7;
  double sweep_h = 1.0;
  sweep->add_option("--family", family, "Hard-instance family")
      ->required()
      ->check(CLI::IsMember({"switch", "drift", "separated-switch", "separated-drift"}));
  sweep->add_option("--budget", budget, "Switch budget S or variation budget V")->required();
  sweep->add_option("--horizons", horizons, "Horizons")->required()->delimiter(',');
  sweep->add_option("--seeds", seeds, "Replications per horizon");
  sweep->add_option("--policy", sweep_policies, "Policies")->delimiter(',');
  sweep->add_option("--ratio", sweep_ratio, "Critical ratio b/(h+b)");
  sweep->add_option("--h", sweep_h, "Overage cost");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::ExperimentConfig cfg;
    if (*simulate) {
      cfg = cli::load_config(config_path);
      cfg.kind = cli::ExperimentKind::Simulate;
    } else if (*replay) {
      cfg.kind = cli::ExperimentKind::Replay;
      cfg.data = data;
      cfg.policies = replay_policies;
      cfg.ratio = ratio;
      cfg.h = h;
      cfg.kappa = kappa;
      cfg.delta = delta;
    } else {
      cfg.kind = cli::ExperimentKind::Sweep;
      cfg.family = nsopt::parse_instance_family(family);
      cfg.budget = budget;
      cfg.horizons = horizons;
      cfg.seeds = seeds;
      cfg.policies = sweep_policies;
      cfg.ratio = sweep_ratio;
      cfg.h = sweep_h;
    }
    if (!grid.empty()) cfg.grid = nsopt::parse_candidate_grid(grid);
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (!out.empty()) cfg.out = out;
    if (app.count("--workers") > 0) cfg.workers = workers;

    std::cout << cli::run_experiment(cfg).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
