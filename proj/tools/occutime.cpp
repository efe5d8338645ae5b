#include <iostream>

#include "occutime/cli.hpp"

int main(int argc, char** argv) {
  return occutime::cli::run(argc, argv, std::cout, std::cerr);
}
