#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace stefan::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { Ok = 0, InvalidInput = 1, SolverFailure = 2, VerifyFailure = 3 };

struct Flags {
    std::string out_dir = ".";
    int threads = 1;
    std::optional<std::uint64_t> seed;  // overrides optimizer.seed
};

/// Runs one subcommand (solve, optimize, refine, verify) and returns its exit code.
/// Progress and diagnostics go to `out` and `err`; CSV files go to flags.out_dir.
int run(const std::string& command, const std::string& config_path, const Flags& flags, std::ostream& out,
        std::ostream& err);

}  // namespace stefan::cli
