// Runs every acceptance criterion on a seeded corpus and prints one line each.
#include <cstdint>
#include <cstring>
#include <iostream>
#include <string>

#include "backtrace_tools/suite.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 7;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--seed N]\n";
      return 2;
    }
  }
  const auto results = backtrace::suite::run_acceptance(seed);
  backtrace::suite::print_summary(std::cout, results);
  for (const auto& r : results) {
    if (!r.pass) return 1;
  }
  return 0;
}
