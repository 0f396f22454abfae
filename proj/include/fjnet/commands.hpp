// Command implementations behind the fjnet executable.
#pragma once

#include <iosfwd>

#include "fjnet/config.hpp"

namespace fjnet {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

struct CommandOptions {
  bool force = false;
  std::filesystem::path out;  // empty: use [output] dir from the config
};

// Each command writes its files under the output directory and a short report
// to `log`. Errors propagate as exceptions; run_command maps them to exit codes.
int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_compare(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_convergence(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_stability(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

using Command = int (*)(const RunConfig&, const CommandOptions&, std::ostream&);

// Load the config and run one command, printing any error to `err`.
int run_command(Command cmd, const std::filesystem::path& config, const CommandOptions& opt, std::ostream& log,
                std::ostream& err);

// 64-bit FNV-1a of the canonical geometry text, as 16 hex digits.
std::string geometry_hash(const NetworkMesh& mesh);

}  // namespace fjnet
