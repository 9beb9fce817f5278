#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobolev {

/**
 * Entry point of the sobolev_dfo tool. `args` excludes the program name.
 * Returns 0 on success, 2 on usage errors (including unknown problem or solver
 * names) and 1 on runtime failures such as unreadable files.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sobolev
