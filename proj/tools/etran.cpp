#include <iostream>
#include <string>
#include <vector>

#include "etran/cli.hpp"

int main(int argc, char** argv) {
  return etran::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
