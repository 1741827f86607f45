#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strad {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_runtime = 2,
    exit_gradcheck = 3,
};

// Entry point of the `strad` executable. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

} // namespace strad
