#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iepinn/training.hpp"

namespace iepinn {

// Flat `key = value` config file; '#' starts a comment. Only `inclusion`
// may repeat. Unknown keys are rejected by each command.
struct ConfigFile {
  std::map<std::string, std::string> values;
  std::vector<std::string> inclusions;

  static ConfigFile parse(const std::string& path);
};

// Overrides shared by every subcommand; unset members fall back to the
// config file (and then to defaults).
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> desk_scale;
};

void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const CliOverrides& overrides);
void cmd_train(const std::string& config_path, const std::string& dataset_path,
               const std::string& out_dir, const CliOverrides& overrides);
void cmd_calibrate(const std::string& run_dir, const std::string& dataset_path);
void cmd_evaluate(const std::string& run_dir, const std::string& dataset_path);
void cmd_plot(const std::string& run_dir);

// Predicted-field bundle written by `train` and consumed by `calibrate`,
// `evaluate` and `plot`.
void save_predicted_fields(const PredictedFields& fields, const std::string& path);
PredictedFields load_predicted_fields(const std::string& path);

}  // namespace iepinn
