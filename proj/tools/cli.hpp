#pragma once

namespace edgegap::cli {

enum ExitCode : int {
    ok = 0,
    invalid_config = 2,
    numerical_failure = 3,
    verification_failure = 4,
};

// Parses argv, runs one subcommand and writes its artifacts.
int run(int argc, char** argv);

} // namespace edgegap::cli
