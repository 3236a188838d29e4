#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace disklab {

inline constexpr const char* kVersion = "0.3.0";

// Runs the command line `args` (program name excluded). Tables go to `out`; the
// run manifest and `error:<kind>: ...` lines go to `err`.
// Returns 0 on success, 1 when the computation fails, 2 on bad usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace disklab
