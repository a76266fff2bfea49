#pragma once

#include <iosfwd>

namespace spop {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_certified = 0,
  exit_input_error = 1,
  exit_refuted = 2,
  exit_exhausted = 3,
};

/// Runs one command. `in` backs file arguments given as "-".
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace spop
