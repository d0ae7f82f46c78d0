#include <iostream>

#include "metgeo/cli/commands.hpp"

int main(int argc, char** argv) {
  return metgeo::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
