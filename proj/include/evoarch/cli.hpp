#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace evoarch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one invocation. `args` excludes the program name. Data goes to `out`,
// diagnostics to `err`. Domain errors print "E<nnn>: <Name>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evoarch::cli
