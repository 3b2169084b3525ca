#pragma once

// Command-line front end: evaluate, compare, timeline, roc and baseline.
//
// Exit codes: 0 success, 2 usage or parameter errors (including unknown
// metrics), 3 input errors (parse, alignment, validation, io), 4 anything
// else. Every failure writes exactly one line to `err`, starting with
// "iideval: error[<kind>]: ".

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace iideval {

inline constexpr const char* kOutputDirEnv = "IIDEVAL_OUTPUT_DIR";

// `args` excludes the program name. `output_dir_env` stands in for the
// environment variable; run_main reads the real one.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err,
            const std::optional<std::string>& output_dir_env = std::nullopt);

int run_main(int argc, char** argv);

}  // namespace iideval
