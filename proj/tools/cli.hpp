#pragma once

#include <iosfwd>

namespace phylo {

inline constexpr const char * version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_error = 2, exit_inconclusive = 3 };

/// The phylocsp command line; argv[0] is the program name.
int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace phylo
