#include <cstdlib>
#include <iostream>

#include "ontoreveal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::map<std::string, std::string> env;
  for (const char* name : {ontoreveal::cli::kApiKeyVariable, ontoreveal::cli::kConfigVariable}) {
    if (const char* value = std::getenv(name)) env.emplace(name, value);
  }
  return ontoreveal::cli::run(args, std::cout, std::cerr, env);
}
