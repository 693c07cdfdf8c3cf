#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oneshot::cli {

/// Runs the command line without the program name in args[0]. Exit codes:
/// 0 success, 1 invalid problem or parameters, 2 unreadable input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oneshot::cli
