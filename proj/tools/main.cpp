#include <vector>

#include "flmcp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flmcp::run_cli(args);
}
