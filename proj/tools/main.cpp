#include <iostream>
#include <string>
#include <vector>

#include "mwt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mwt::run(args, std::cout, std::cerr);
}
