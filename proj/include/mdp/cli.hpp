#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdp/montecarlo.hpp"

namespace mdp {

// Parsed command line. Experiment parameters come from a key=value config
// file (or a compiled-in preset name) plus --set overrides; flags resolve
// ahead of the environment, which resolves ahead of the file.
struct CliConfig {
  std::string command;
  std::optional<std::string> config_path;  // file path or preset name
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string output_dir = ".";
  bool plot = false;
  bool raw = false;
  std::optional<uint64_t> seed;
  int threads = 0;  // 0 = hardware parallelism
};

// Exits with code 2 on usage/config problems, 3 on I/O problems.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

CliConfig parse_args(const std::vector<std::string>& args);

// Fully resolved key -> value map for one command: defaults, then config
// file section, then environment seed, then --set pairs, then --seed.
// Unknown keys anywhere in the file are an error.
std::map<std::string, std::string> resolve_keys(const CliConfig& cli);

// Compiled-in preset text by name ("example1", "example2"); nullopt otherwise.
std::optional<std::string> preset_text(const std::string& name);

DistributionSpec parse_dist(const std::string& text);

// Builds the experiment from resolved keys (rate-curve command).
ExperimentConfig make_experiment_config(const std::map<std::string, std::string>& keys);

int cmd_rate_curve(const CliConfig& cli);
int cmd_clt_check(const CliConfig& cli);
int cmd_lln_check(const CliConfig& cli);
int cmd_legendre(const CliConfig& cli);
int cmd_path_rate(const CliConfig& cli);
int cmd_validate(const CliConfig& cli);

// Dispatch; returns the process exit status.
int run_cli(const std::vector<std::string>& args);

// Serialization helpers shared by commands and tests.
std::string rate_curve_csv(const std::vector<RateRow>& rows);
std::string deviations_csv(const std::vector<Deviation>& devs);
std::string rate_curve_svg(const std::vector<RateRow>& rows);
std::string manifest_text(const std::string& command,
                          const std::map<std::string, std::string>& keys);

}  // namespace mdp
