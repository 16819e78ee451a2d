#include <iostream>
#include <vector>

#include <scatter/cli_io.hpp>

int main(int argc, char** argv) {
  return scatter::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout);
}
