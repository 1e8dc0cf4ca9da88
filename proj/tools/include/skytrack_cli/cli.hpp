#pragma once

// The skytrack command line as a library, so tests can run it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace skytrack::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,    // malformed or inconsistent inputs and configuration
  kRuntime = 4,  // undefined metrics, stage failures
};

/// args excludes the program name. Reads stdin only when a path is "-".
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace skytrack::cli
