#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace eta::cli {

void cmd_gen_data(const ExperimentConfig& config);
void cmd_train(const ExperimentConfig& config, const std::string& mode);
void cmd_eval(const ExperimentConfig& config, const std::vector<std::string>& checkpoints);
// Throws PropertyViolation when a randomized check fails; inject_fault is the
// negative-control hook that corrupts the W1 value under test.
void cmd_bounds_check(const ExperimentConfig& config, std::size_t trials, bool inject_fault);
void cmd_gevd_fit(const ExperimentConfig& config, const std::string& samples_csv,
                  const std::string& out_json);
void cmd_gevd_quantile(const ExperimentConfig& config, const std::string& params_json,
                       const std::vector<double>& direct_params, double gamma,
                       const std::vector<double>& levels);

}  // namespace eta::cli
