#pragma once

// Command-line entry point. Exit codes: 0 success, 1 usage, 2 data error,
// 3 numeric failure.

#include <string>

namespace fairsched {

// Options shared by every subcommand.
struct RunConfig {
    unsigned seed = 1;
    std::string out_dir = ".";
    int window_days = 60;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

int run_cli(int argc, char** argv);

}  // namespace fairsched
