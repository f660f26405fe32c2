#include <iostream>

#include "lipminor_app/cli.hpp"

int main(int argc, char** argv) {
  return lipminor::app::run_cli(argc, argv, std::cout, std::cerr);
}
