#include <iostream>

#include "trendfilter/cli.hpp"

int main(int argc, char** argv) {
  return trendfilter::cli::run(argc, argv, std::cout, std::cerr);
}
