#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracopt {

inline constexpr int kExitSolved = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitError = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracopt
