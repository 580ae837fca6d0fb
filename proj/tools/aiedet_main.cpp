#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aiedet/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive subspace detectors in heterogeneous clutter"};
  app.require_subcommand(1);

  aiedet::CommandOptions opt;
  std::string config;
  std::string thresholds;
  std::string out = ".";
  std::string hypothesis = "H1";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "TOML experiment configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override the configured seed");
    sub->add_option("--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output directory");
  };

  CLI::App* curve = app.add_subcommand("curve", "PD versus SCR curves");
  common(curve);

  CLI::App* cfar = app.add_subcommand("cfar", "Empirical PFA versus speckle correlation");
  common(cfar);
  cfar->add_option("--deltas", opt.deltas, "Comma list or start:step:stop");
  cfar->add_option("--thresholds", thresholds, "thresholds.csv from calibrate")
      ->check(CLI::ExistingFile);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Thresholds at the configured PFA");
  common(calibrate);

  CLI::App* detect = app.add_subcommand("detect", "Run the detectors on a dataset file");
  common(detect);
  detect->add_option("--data", opt.data, "HCD1 dataset")->required();
  detect->add_option("--thresholds", thresholds, "thresholds.csv from calibrate")
      ->check(CLI::ExistingFile);

  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic HCD1 dataset");
  common(generate);
  generate->add_option("--hypothesis", hypothesis, "H0 or H1")
      ->check(CLI::IsMember({"H0", "H1"}));
  generate->add_option("--scr-db", opt.scr_db, "Signal-to-clutter ratio in dB");
  generate->add_option("--trial", opt.trial, "Trial index of the fixture stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : aiedet::kExitConfig;
  }

  if (!config.empty()) opt.config = config;
  if (!thresholds.empty()) opt.thresholds = thresholds;
  opt.out_dir = out;
  opt.hypothesis = hypothesis == "H0" ? aiedet::Hypothesis::H0 : aiedet::Hypothesis::H1;

  const CLI::App* sub = app.get_subcommands().front();
  return aiedet::run_command(sub->get_name(), opt, std::cerr);
}
