#pragma once

#include <iosfwd>

namespace hqmm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,
  kUsageError = 2,
};

/// Entry point of the `hqmm` tool. Writes reports to `out` and diagnostics to
/// `err`; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hqmm::cli
