#include <iostream>

#include "geoscout/cli.hpp"

int main(int argc, char** argv) {
  return geoscout::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
