#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace ontoreveal::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,  // unreadable or malformed input, unresolved names, no path
  kUsageError = 2,
  kProviderError = 3,
  kNoProgress = 4,
  kStepLimit = 5,
  kNonconformingQuery = 6,
  kBudgetExceeded = 7,
  kUnparseableResponse = 8,
};

inline constexpr const char* kApiKeyVariable = "ONTOREVEAL_API_KEY";
inline constexpr const char* kConfigVariable = "ONTOREVEAL_CONFIG";
inline constexpr const char* kDefaultConfigFile = "ontoreveal.json";

/// Runs one command. `args` excludes the program name; `env` holds the
/// environment variables the tool reads.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env = {});

}  // namespace ontoreveal::cli
