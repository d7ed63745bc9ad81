#pragma once

#include "stabkit/bounds.hpp"
#include "stabkit/stabsel.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stabkit::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kParameterError = 1,  // bad flags, unsolvable parameters, malformed config
  kNotAttainable = 2,   // params: PFER bound cannot be met, result still printed
  kIoError = 3,
  kFitError = 4,
};

constexpr std::uint64_t kDefaultSeed = 2014;

/// Entry point shared by main() and the tests. argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json params_json(const bounds::ParamSolution& solution);

}  // namespace stabkit::cli
