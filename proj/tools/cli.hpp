#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddtrack::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kConfig = 2,
    kRuntime = 3,
};

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddtrack::cli
