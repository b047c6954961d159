#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcpred::cli {

/// Entry point for the `pcpred` tool. Returns the process exit status:
/// 0 on success, 1 on a runtime error, 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcpred::cli
