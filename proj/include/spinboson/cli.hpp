// cli.hpp: command-line front end
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure
// (including failed acceptance criteria under `reproduce`).

#pragma once

#include <iosfwd>

namespace spinboson {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinboson
