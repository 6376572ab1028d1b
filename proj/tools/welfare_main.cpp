#include <iostream>
#include <string>
#include <vector>

#include "welfare/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return welfare::cli::run(args, std::cout, std::cerr);
}
