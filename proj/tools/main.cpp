#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sheetaudit::cli::run_cli(args, std::cout, std::cerr, ::isatty(STDOUT_FILENO) != 0);
}
