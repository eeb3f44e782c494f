#pragma once

#include <ostream>

namespace parisi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;

/// Entry point of the `parisi` tool. Subcommands: eval, minimize, grad-check,
/// moments, classify, phase-scan, sk-exact, sk-compare. Results go to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parisi
