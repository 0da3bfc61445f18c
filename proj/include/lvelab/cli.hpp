#pragma once

#include <ostream>

namespace lvelab::cli {

inline constexpr int kExitOk = 0;
/// A module raised an error, or a computed result failed its own check.
inline constexpr int kExitFailure = 1;
/// Unknown flags, malformed values or settings outside the module caps.
inline constexpr int kExitUsage = 2;

/// Parses argv, dispatches to one subcommand and writes its report to `out`
/// (or to --output). Help and usage errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lvelab::cli
