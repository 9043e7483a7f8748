#ifndef FLMCP_CLI_HPP_
#define FLMCP_CLI_HPP_

#include <string>
#include <vector>

namespace flmcp {

/// Parses and runs one command line (without the program name).
/// Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace flmcp

#endif  // FLMCP_CLI_HPP_
