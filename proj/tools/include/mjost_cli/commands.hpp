#pragma once

#include <ostream>

#include "mjost_cli/config.hpp"

namespace mjost::cli {

enum ExitCode { kSuccess = 0, kConfigError = 2, kNumericFailure = 3 };

/// Runs one command and writes its CSV to `out`. Returns kNumericFailure
/// (after writing what was computed) when the integrator gives up.
int run_command(const RunConfig& rc, std::ostream& out);

/// Full command-line entry point: argument parsing, logging, config loading,
/// output file handling and exit-code mapping.
int main_entry(int argc, char** argv);

}  // namespace mjost::cli
