#include <iostream>

#include "raceworlds/cli.hpp"

int main(int argc, char** argv) {
  return raceworlds::cli::run(argc, argv, std::cout, std::cerr);
}
