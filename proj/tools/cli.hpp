#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace valuetax::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,  // validation, parse or domain failure
  kIncoherent = 2,    // incoherence or propagation conflict
  kIoFailure = 3,
};

/// Runs one command line (without the program name). Rendered output goes to `out` or to the
/// --output file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace valuetax::cli
