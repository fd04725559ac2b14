#include <iostream>

#include "adwar/cli.hpp"

int main(int argc, char** argv) {
  return adwar::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
