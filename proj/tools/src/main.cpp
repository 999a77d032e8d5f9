#include <iostream>
#include <string>
#include <vector>

#include "backtrace_tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return backtrace::cli::run(args, std::cout, std::cerr);
}
