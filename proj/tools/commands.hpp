#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nonlocal::cli {

// Exit codes: 0 success, 2 usage/parse error, 3 computation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nonlocal::cli
