#include <string>
#include <vector>

#include "hopqa/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hopqa::cli_run(std::move(args));
}
