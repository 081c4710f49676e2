#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qsat/instance.hpp"
#include "qsat/spectral.hpp"

namespace qsat::cli {

enum ExitCode : int {
  kExitSatisfiable = 0,
  kExitUnsatisfiable = 1,
  kExitIndeterminate = 2,
  kExitUsage = 3,
  kExitCoreRejected = 4,
  kExitCapacity = 5,
  kExitVerificationFailed = 6,
};

inline constexpr std::uint64_t kDefaultSeed = 12345;

int exit_code_for(Verdict verdict);

/// Resolves "builtin:<name>" (figure-a, figure-b, empty) or reads a file.
QsatInstance load_instance(const std::string& source);

/// Resolves "builtin:triangle-double" or reads an instance/structure file.
Structure load_structure(const std::string& source);

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsat::cli
