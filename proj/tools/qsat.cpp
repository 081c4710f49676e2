#include <iostream>
#include <string>
#include <vector>

#include "qsat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qsat::cli::run(args, std::cout, std::cerr);
}
