#pragma once

#include <iostream>

namespace qedist {

// Exit codes: 0 ok, 1 computation error, 2 bad input, 3 reproduction failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSuiteFailure = 3;

int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace qedist
