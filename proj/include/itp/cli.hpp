#pragma once

#include <iosfwd>

namespace itp {

/// Exit codes: 0 success, 1 check failure, 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace itp
