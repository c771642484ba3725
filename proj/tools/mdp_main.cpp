#include <string>
#include <vector>

#include "mdp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mdp::run_cli(args);
}
