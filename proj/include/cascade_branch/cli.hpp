#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade_branch::cli {

/// Entry point for the `cascade_branch` tool. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace cascade_branch::cli
