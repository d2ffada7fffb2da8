#include <iostream>

#include "advsim/cli.hpp"
#include "advsim/log.hpp"

int main(int argc, char** argv) {
  advsim::apply_log_level_env();
  return advsim::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
