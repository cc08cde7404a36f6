#include <iostream>

#include "apna/cli/app.hpp"

int main(int argc, char** argv) {
  return apna::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
