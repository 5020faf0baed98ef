#include <iostream>
#include <string>
#include <vector>

#include "nfgcover/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nfgcover::run_cli(args, std::cout, std::cerr);
}
