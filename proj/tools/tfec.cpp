#include <iostream>
#include <string>
#include <vector>

#include "tfec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tfec::cli::run(args, std::cerr);
}
