#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace oplens::cli {

/// Exit statuses of the tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitNegative = 1,      // certificate violation, refusal, fuzz candidate
    kExitUsage = 2,         // bad arguments or unparsable matrix file
    kExitTooLarge = 3,      // dim above --max-dim
    kExitInconsistent = 4,  // internal inconsistency or inconsistent verdict
    kExitDomain = 5,        // parameters outside an operation's domain
};

struct Environment {
    std::optional<std::string> tol;  // OPERATOR_LENS_TOL

    [[nodiscard]] static Environment from_process();
};

/// Runs one command line (without the program name) and returns the exit
/// status. Reports go to `out`, one-line diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Environment& env = Environment::from_process());

}  // namespace oplens::cli
