// The `short` command line. Exit codes: 0 success, 1 validation failure,
// 2 usage error (bad flags, unreadable files, malformed options).
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shortkit {

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shortkit
