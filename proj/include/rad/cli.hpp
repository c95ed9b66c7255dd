#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rad {

// Full command-line driver; `args` excludes the program name. Returns the
// process exit code: 0 success, 1 usage error, 2 runtime error (bad input
// data, I/O, resource limits), 3 internal consistency failure (contract
// violations, cache misses, benchmark cross-check disagreement).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rad
