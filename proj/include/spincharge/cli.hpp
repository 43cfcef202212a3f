#pragma once

#include <string>
#include <vector>

namespace spincharge {

// Exit codes: 0 success, 1 unexpected failure (or, with validate --strict, a failed
// criterion), 2 configuration / precondition error, 3 energy-drift abort.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace spincharge
