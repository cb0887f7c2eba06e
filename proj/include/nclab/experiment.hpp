#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace nclab::experiment {

// Exit codes shared with the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

struct RunRequest {
    std::string mode;         // density | correlate | characteristic | simulate | verify
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;                          // 0 = hardware default
    std::optional<std::uint64_t> seed;        // overrides the config seed
};

// Loads the JSON config, dispatches on the mode, writes the output files.
// Returns an exit code; diagnostics go to stderr, progress to stdout.
int run(const RunRequest& request);

}  // namespace nclab::experiment
