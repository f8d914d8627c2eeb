#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace anisoflow {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 1,
    exit_convergence = 2,
    exit_io = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anisoflow
