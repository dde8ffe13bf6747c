#ifndef RACKMSR_CLI_HPP
#define RACKMSR_CLI_HPP

#include <string>
#include <vector>

namespace rackmsr::cli {

// Runs the tool on argv[1..] and returns the process exit code:
// 0 success, 1 a property check failed, 2 configuration or usage error,
// 3 coefficient search exhaustion.
int run(std::vector<std::string> args);

} // namespace rackmsr::cli

#endif
