#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morphwing::cli {

// Exit codes: 0 success, 1 module error (error JSON on `err`), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace morphwing::cli
