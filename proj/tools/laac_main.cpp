#include <string>
#include <vector>

#include "laac/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return laac::run_cli(args);
}
