#include <iostream>
#include <string>
#include <vector>

#include "placebeb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return placebeb::cli::run(args, std::cout, std::cerr);
}
