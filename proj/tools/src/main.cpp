#include <iostream>

#include "cgq_tools/cli.hpp"

int main(int argc, char** argv) {
  return cgq::tools::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
