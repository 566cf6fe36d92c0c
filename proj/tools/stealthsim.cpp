#include <iostream>

#include "stealth/harness/commands.hpp"

int main(int argc, char** argv) {
  return stealth::harness::execute_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
