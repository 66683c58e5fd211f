#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace singbsde::app {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNonConvergence = 3,
    kSelftestFailed = 4,
};

// Full command line, argv[0] included. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace singbsde::app
