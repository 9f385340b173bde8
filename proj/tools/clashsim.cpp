#include <iostream>

#include "clash/cli.hpp"

int main(int argc, char** argv) {
  clash::CliConfig cfg;
  try {
    cfg = clash::parse_args(argc, argv);
  } catch (const clash::UsageError& e) {
    if (std::string(e.what()) == "help requested") {
      std::cout << e.help();
      return 0;
    }
    std::cerr << "clashsim: " << e.what() << "\n\n" << e.help();
    return 2;
  }
  return clash::execute(cfg);
}
