#include <iostream>

#include "repfair/cli.hpp"

int main(int argc, char** argv) {
  return repfair::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
