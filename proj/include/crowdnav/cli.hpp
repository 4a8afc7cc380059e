#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdnav {

/// Dispatch a full command line (without argv[0]).
/// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 runtime failure.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace crowdnav
