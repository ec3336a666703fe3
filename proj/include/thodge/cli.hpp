#pragma once

// Command-line front end: loads models, runs the exact and spectral
// computations, and emits machine-readable reports.  Reports are
// deterministic byte for byte unless --timing is requested.

#include <iosfwd>
#include <string>
#include <vector>

namespace thodge {

// Executes one command line (the arguments after the program name), writing
// the report to `out` and diagnostics to `err`.  Returns the process exit
// code: 0 when the command ran and every hard check passed (indeterminate
// verdicts and absent witnesses are findings — reported, not fatal); 1 when
// a verification check failed or an internal error occurred; 2 on invalid
// input (bad flags, malformed models or expressions, failed model
// validation, rejected preconditions).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thodge
