#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace backtrace::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kBadInput = 1,       ///< malformed JSON, bad flags or arguments
  kInadmissible = 2,   ///< target violates the decay bound (witness printed)
  kRefuted = 3,        ///< candidate is not an attaining datum
  kNoFace = 4,         ///< asked for a face through the extremal datum
  kSuiteFailed = 5,    ///< `corpus` found a failing criterion
};

/// Runs one command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace backtrace::cli
