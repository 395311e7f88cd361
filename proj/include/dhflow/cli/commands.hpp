#pragma once

#include <string>

#include "dhflow/io/config.hpp"

namespace dhflow::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  /// Unreadable, malformed or invalid configuration.
  kConfigError = 2,
  /// A flow ran out of admissible restarts.
  kRestartExhausted = 3,
  /// Any other numerical failure, including failed validation checks.
  kNumericalFailure = 4,
};

struct CommandOptions {
  /// Suppress progress on stderr.
  bool quiet = false;
};

/// Each command writes into cfg.output.directory (created if needed),
/// always including resolved_config.json, and returns an exit code. Errors
/// are reported in error.json and on stderr rather than thrown.
int cmd_spectrum(const io::RunConfig& cfg, const CommandOptions& opt = {});
int cmd_flow(const io::RunConfig& cfg, const CommandOptions& opt = {});
int cmd_continue(const io::RunConfig& cfg, const CommandOptions& opt = {});
int cmd_validate(const io::RunConfig& cfg, const CommandOptions& opt = {});

/// Full command line: `dhflow <spectrum|flow|continue|validate> [--config
/// path] [--out dir] [--seed u64] [--quiet]`.
int run_cli(int argc, char** argv);

}  // namespace dhflow::cli
