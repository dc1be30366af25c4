#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrbench/harness.hpp"
#include "lrbench/report.hpp"

namespace lrbench {

/// Bad command line. `exit_code` is 0 for --help/--version style exits.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct CliOptions {
    std::vector<std::string> strategies;  ///< expanded; "all" becomes the full roster
    std::vector<std::uint64_t> seeds{42};
    std::size_t epochs = 80;
    std::size_t batch_size = 64;
    std::size_t jobs = 1;
    ReportFormat format = ReportFormat::csv;
    std::optional<std::filesystem::path> output;       ///< stdout when empty
    std::optional<std::filesystem::path> trace;        ///< per-step DALS traces
    std::optional<std::filesystem::path> defaults_file;
    std::vector<std::string> overrides;                ///< key=value, applied after the file
    std::optional<std::filesystem::path> dump_data;
    bool list = false;

    friend bool operator==(const CliOptions&, const CliOptions&) = default;
};

/// Parses argv (argv[0] is the program name). Unknown flags or strategy
/// names throw UsageError with a nonzero exit code.
CliOptions parse_options(int argc, const char* const* argv);
CliOptions parse_options(const std::vector<std::string>& args);

/// Flags that reproduce `opts` through parse_options (without argv[0]).
std::vector<std::string> render_flags(const CliOptions& opts);

/// Defaults table after the file and overrides in `opts`.
Defaults resolve_defaults(const CliOptions& opts);

/// One RunConfig per strategy for `seed`.
std::vector<RunConfig> build_runs(const CliOptions& opts, const Defaults& defaults, std::uint64_t seed);

/// Path for one strategy's trace: "<stem>_<strategy><ext>" next to `base`.
std::filesystem::path trace_path(const std::filesystem::path& base, const std::string& strategy);

/// Full CLI behaviour; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace lrbench
