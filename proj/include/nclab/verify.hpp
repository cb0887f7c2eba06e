#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nclab::verify {

struct CheckResult {
    std::string name;
    double measured = 0.0;   // worst observed error (units depend on the check)
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 20260810;
    long mc_paths = 100000;
    bool quick = false;  // smaller grids and path counts for smoke runs
};

// Runs the whole identity suite; one result per check, in a fixed order.
// When `progress` is non-null a pass/fail line is printed as each check
// finishes.
std::vector<CheckResult> run_verification(const VerifyOptions& options,
                                          std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace nclab::verify
