#include <string>
#include <vector>

#include "onto/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return onto::dispatch(std::move(args));
}
