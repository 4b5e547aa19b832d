#pragma once

#include <iosfwd>

#include "config.hpp"

namespace dcesync::cli {

enum ExitCode : int { exit_ok = 0, exit_run_failure = 1, exit_config_error = 2, exit_check_negative = 3 };

/// Full command line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Trajectory CSV to config.out (stdout when empty) plus a summary.
int cmd_evolve(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Grid CSV to config.out; exit_run_failure only when every cell failed.
int cmd_sweep(const RunConfig& config, unsigned threads, std::ostream& out, std::ostream& err);
/// Propagates to extract_time (>= tau) and writes the coefficient CSV.
int cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Verdicts for config.coefficients; exit_check_negative unless a dominant block synchronizes.
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dcesync::cli
