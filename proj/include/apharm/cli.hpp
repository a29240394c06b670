#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apharm::cli {

/// Exit codes: 0 success, 2 input error, 3 numeric verification failure,
/// 4 unsupported density.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apharm::cli
