#pragma once

// Batch commands behind the `etk` executable. Each returns the process exit
// status so the commands can be driven from tests without spawning a process.

#include "etk/zones.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace etk::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParseFailure = 2,
    kAssemblyFailure = 3,
    kDegeneratePca = 4,
};

struct RunConfig {
    std::vector<std::filesystem::path> sessions;
    std::string zones = "default";       // "default" or a `k,label,x,y` CSV
    zones::FitMode zone_fit = zones::FitMode::fixed;
    double window_s = 15.0;
    double hop_s = 1.0;
    std::optional<double> bandwidth;    // nullopt = Silverman
    std::filesystem::path out;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// A directory holding session directories (and no meta.json itself) expands
/// to its sorted session subdirectories; anything else is kept as is.
std::vector<std::filesystem::path> expand_session_paths(const std::vector<std::filesystem::path>& paths);

/// Parses and validates each session, printing a JSON summary to `out`.
/// Exit 2 on a parse error, 3 on an assembly error. With `out_dir`, the
/// summary and a manifest are also written there.
int cmd_ingest(const std::vector<std::filesystem::path>& paths, std::ostream& out,
               const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Full analysis run. Writes every artifact into config.out.
int cmd_analyze(const RunConfig& config);

/// Writes `count` synthetic sessions. `profile` is "default" or a JSON path.
int cmd_synth(const std::string& profile, std::size_t count, std::uint64_t seed, const std::filesystem::path& out);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace etk::cli
