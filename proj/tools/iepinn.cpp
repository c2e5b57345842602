#include <CLI11.hpp>
#include <iostream>

#include "iepinn/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous elasticity reconstruction from noisy displacement fields"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "run", dataset_path, run_dir;
  iepinn::CliOverrides overrides;
  std::uint64_t seed_value = 0;
  double desk_scale_value = 1.0;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_value, "Random seed (overrides the config)")
        ->each([&](const std::string&) { overrides.seed = seed_value; });
  };

  auto* generate = app.add_subcommand("generate",
                                      "Phantom + forward solve + optional noise -> .efd dataset");
  generate->add_option("--config", config_path, "Config file")->required();
  generate->add_option("--out-dir", out_dir, "Output directory");
  add_seed(generate);

  auto* train = app.add_subcommand("train",
                                   "Phase 1 training -> checkpoints, loss history, predicted fields");
  train->add_option("--config", config_path, "Config file")->required();
  train->add_option("--dataset", dataset_path, "Input .efd dataset")->required();
  train->add_option("--out-dir", out_dir, "Run directory");
  train->add_option("--desk-scale", desk_scale_value,
                    "Stage-length multiplier in (0, 1]")
      ->each([&](const std::string&) { overrides.desk_scale = desk_scale_value; });
  add_seed(train);

  auto* calibrate = app.add_subcommand("calibrate",
                                       "Phase 2: absolute modulus scale from the applied force");
  calibrate->add_option("--run-dir", run_dir, "Training run directory")->required();
  calibrate->add_option("--dataset", dataset_path, "Dataset with applied_force")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Metrics and report bundle");
  evaluate->add_option("--run-dir", run_dir, "Training run directory")->required();
  evaluate->add_option("--dataset", dataset_path, "Dataset with truth fields")->required();

  auto* plot = app.add_subcommand("plot", "Heatmaps of the predicted fields");
  plot->add_option("--run-dir", run_dir, "Training run directory")->required();

  try {
    app.parse(argc, argv);
    if (generate->parsed()) iepinn::cmd_generate(config_path, out_dir, overrides);
    if (train->parsed()) iepinn::cmd_train(config_path, dataset_path, out_dir, overrides);
    if (calibrate->parsed()) iepinn::cmd_calibrate(run_dir, dataset_path);
    if (evaluate->parsed()) iepinn::cmd_evaluate(run_dir, dataset_path);
    if (plot->parsed()) iepinn::cmd_plot(run_dir);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const iepinn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
