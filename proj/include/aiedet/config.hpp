#pragma once

// Experiment configuration files. The format is TOML with a fixed schema;
// any unknown section or key is an error.
//
//   [scenario]   N, K, L, p
//   [clutter]    delta, shape_v, scale_u
//   [signal]     scr_db (array), scattering, subspace_f0, subspace_df
//   [detection]  detectors (array), pfa, threshold_trials, pd_trials
//   [aie]        n_max, sigma_floor
//   [anmf]       re_iterations
//   [run]        seed

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aiedet/montecarlo.hpp"

namespace aiedet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(std::string_view text, const std::string& source_name = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view to_string(Scattering s);

}  // namespace aiedet
