#pragma once

// Subcommands of the aiedet tool. Each writes its data files plus a
// `<command>_manifest.json` into the output directory and returns a
// process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aiedet/core.hpp"

namespace aiedet {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitDataset = 4,
};

struct CommandOptions {
  std::optional<std::filesystem::path> config;  // defaults apply when absent
  std::optional<std::uint64_t> seed;            // overrides [run] seed
  unsigned workers = 1;
  std::filesystem::path out_dir = ".";
  std::string deltas;                           // cfar
  std::filesystem::path data;                   // detect
  std::optional<std::filesystem::path> thresholds;  // detect, cfar
  Hypothesis hypothesis = Hypothesis::H1;       // generate
  double scr_db = 40.0;                         // generate
  std::uint64_t trial = 0;                      // generate
};

/// "a,b,c" or "start:step:stop" (inclusive). Throws ConfigError.
std::vector<double> parse_delta_list(std::string_view text);

int cmd_curve(const CommandOptions& opt, std::ostream& log);
int cmd_cfar(const CommandOptions& opt, std::ostream& log);
int cmd_calibrate(const CommandOptions& opt, std::ostream& log);
int cmd_detect(const CommandOptions& opt, std::ostream& log);
int cmd_generate(const CommandOptions& opt, std::ostream& log);

/// Dispatches by subcommand name; unknown names return kExitConfig.
int run_command(std::string_view name, const CommandOptions& opt, std::ostream& log);

}  // namespace aiedet
