#pragma once

#include <ostream>

namespace ietskew {

// The iet-skew command line. Prints a one-line summary to out; errors go to
// err as "error: <Code>: message" with exit status 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ietskew
