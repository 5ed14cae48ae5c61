#include <string>
#include <vector>

#include "spillover/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spill::cli::run(args);
}
