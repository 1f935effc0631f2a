#pragma once

#include <ostream>

namespace weakpair {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitValidation = 3, kExitSelftest = 4 };

/// Entry point for the weakpair command line. Flags may also come from
/// WEAKPAIR_* environment variables (e.g. WEAKPAIR_SEED, WEAKPAIR_BETA).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weakpair
