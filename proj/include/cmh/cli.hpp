#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmh::cli {

// Runs one subcommand. args excludes the program name. Returns 0 on success,
// 2 on usage errors and 1 on numerical or certification errors (the error
// name is printed to err).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmh::cli
