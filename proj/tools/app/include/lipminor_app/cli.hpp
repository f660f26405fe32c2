#pragma once

#include <iosfwd>

namespace lipminor::app {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAcceptanceFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumerical = 3;

// Entry point of the lipminor binary. Normal output goes to `out`,
// diagnostics and logs to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lipminor::app
