#pragma once

#include <ostream>

namespace exes {

// Entry point of the `exes` command. Exit codes: 0 success, 2 validation or
// usage error, 3 timeout, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exes
