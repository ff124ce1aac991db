#include <iostream>
#include <string>
#include <vector>

#include "wpcm_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wpcm::cli::run(args, std::cout, std::cerr);
}
