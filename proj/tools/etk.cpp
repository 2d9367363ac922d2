#include "etk/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void init_logging() {
    auto logger = spdlog::stderr_color_mt("etk");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ETK_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off"; only honour it when asked for.
        if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();

    CLI::App app{"eSports session telemetry toolkit"};
    app.require_subcommand(1);

    std::vector<std::filesystem::path> ingest_paths;
    std::optional<std::filesystem::path> ingest_out;
    auto* ingest = app.add_subcommand("ingest", "Parse and validate session directories");
    ingest->add_option("paths", ingest_paths, "Session directories (or a directory of them)")->required();
    ingest->add_option("--out", ingest_out, "Also write the summary and a manifest here");

    etk::cli::RunConfig cfg;
    std::string bandwidth = "auto";
    std::string zone_fit = "fixed";
    auto* analyze = app.add_subcommand("analyze", "Run the gaze and input analysis");
    analyze->add_option("sessions", cfg.sessions, "Session directories (or a directory of them)")->required();
    analyze->add_option("--zones", cfg.zones, "Zone model: `default` or a k,label,x,y CSV")->capture_default_str();
    analyze->add_option("--zone-fit", zone_fit, "Zone fitting: fixed, lloyd or farthest_first")
        ->check(CLI::IsMember({"fixed", "lloyd", "farthest_first"}))
        ->capture_default_str();
    analyze->add_option("--window-s", cfg.window_s, "Rolling window length in seconds")->capture_default_str();
    analyze->add_option("--hop-s", cfg.hop_s, "Rolling window hop in seconds")->capture_default_str();
    analyze->add_option("--bandwidth", bandwidth, "KDE bandwidth: `auto` (Silverman) or a value")->capture_default_str();
    analyze->add_option("--jobs", cfg.jobs, "Sessions processed concurrently")->capture_default_str();
    analyze->add_option("--seed", cfg.seed, "Seed for sampling and zone fitting")->capture_default_str();
    analyze->add_option("--out", cfg.out, "Output directory")->required();

    std::string profile = "default";
    std::size_t count = 15;
    std::uint64_t synth_seed = 0;
    std::filesystem::path synth_out;
    auto* synth = app.add_subcommand("synth", "Generate synthetic sessions");
    synth->add_option("--profile", profile, "`default` or a profile JSON file")->capture_default_str();
    synth->add_option("--count", count, "Number of sessions")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return etk::cli::cmd_ingest(ingest_paths, std::cout, ingest_out);
        if (*analyze) {
            if (bandwidth != "auto") {
                try {
                    cfg.bandwidth = std::stod(bandwidth);
                } catch (const std::exception&) {
                    spdlog::error("--bandwidth must be `auto` or a number");
                    return etk::cli::kUsage;
                }
            }
            if (zone_fit == "lloyd") cfg.zone_fit = etk::zones::FitMode::lloyd;
            if (zone_fit == "farthest_first") cfg.zone_fit = etk::zones::FitMode::farthest_first;
            return etk::cli::cmd_analyze(cfg);
        }
        if (*synth) return etk::cli::cmd_synth(profile, count, synth_seed, synth_out);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return etk::cli::kUsage;
    }
    return etk::cli::kUsage;
}
