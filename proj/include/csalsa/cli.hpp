#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csalsa::cli {

enum ExitCode : int { Converged = 0, Exhausted = 1, Usage = 2, Diverged = 3 };

/// Environment variable naming the default output root.
inline constexpr const char* output_root_env = "CSALSA_OUTPUT_ROOT";

/// Entry point of the `csalsa` executable. args excludes argv[0].
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csalsa::cli
