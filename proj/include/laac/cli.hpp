#pragma once

#include <string>
#include <vector>

namespace laac {

// Entry point behind the laac binary. args excludes argv[0].
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
int run_cli(const std::vector<std::string>& args);

}  // namespace laac
