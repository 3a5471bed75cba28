#include <iostream>
#include <string>
#include <vector>

#include "xpgn_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return xpgn::run(args, std::cout, std::cerr);
}
