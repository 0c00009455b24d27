#ifndef FCLT_CLI_HPP
#define FCLT_CLI_HPP

#include "fclt/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fclt {

enum class Command { Simulate, DistTable, SizePower, VarianceCheck, TwoStep };

struct CliInvocation {
    Command command = Command::DistTable;
    std::optional<std::filesystem::path> config_path;
    Overrides overrides;
    std::filesystem::path output_dir;
    std::optional<std::size_t> threads;
    bool full_scale = false;
    bool quiet = false;
    std::uint64_t rep = 0; ///< replication dumped by `simulate` / analysed by `two-step`
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Environment variable consulted when --output-dir is absent.
inline constexpr const char* kOutputDirEnv = "FCLT_OUTPUT_DIR";

/// Runs the parsed invocation. Progress goes to `err`, rendered tables to `out`.
int dispatch(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fclt

#endif
