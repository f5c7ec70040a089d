#pragma once

#include <iosfwd>

namespace gardener::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,
  kInternal = 4,
};

/// Entry point of the `gardener` executable, separated from main() so tests
/// can drive it with captured streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gardener::cli
