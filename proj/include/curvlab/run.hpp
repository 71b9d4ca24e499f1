#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvlab {

// exit status contract shared by the CLI and the in-process test harness
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailedVerdict = 1;
inline constexpr int kExitInvalidInput = 2;

// Parses argv-style arguments (without the program name), runs the chosen
// experiment, writes report.json plus CSV artifacts into the output
// directory, and returns the process exit code. Timing lines go to `log`
// only; reports carry none so identical configs reproduce identical files.
int run(const std::vector<std::string>& args, std::ostream& log);

} // namespace curvlab
