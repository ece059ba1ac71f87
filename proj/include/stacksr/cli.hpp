#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stacksr {

// Entry point of the command-line front end. Data goes to `out`,
// diagnostics to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stacksr
