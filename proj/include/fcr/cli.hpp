#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fcr/pipeline.hpp"

namespace fcr::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kRuntime = 2,
  kPartialFailure = 3,  // finished, but some LLM calls fell back
};

struct Services {
  ChatClientFactory client_factory;  // empty: HTTP clients
};

/// Entry point of the `fcr` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, const Services& services, std::ostream& out,
        std::ostream& err);

}  // namespace fcr::cli
