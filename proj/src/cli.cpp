#include "etk/cli.hpp"

#include "etk/ingest.hpp"
#include "etk/input_features.hpp"
#include "etk/numerics.hpp"
#include "etk/preprocess.hpp"
#include "etk/random.hpp"
#include "etk/synth.hpp"
#include "etk/text.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace etk::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using text::format_number;

namespace {

constexpr const char* kToolVersion = "etk 0.3.0";
constexpr std::size_t kScatterSamples = 3000;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ordered_json input_digests(const std::vector<fs::path>& sessions) {
    ordered_json digests = ordered_json::array();
    for (const auto& dir : sessions) {
        std::vector<fs::path> files;
        if (fs::is_directory(dir)) {
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.is_regular_file()) files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            digests.push_back({{"path", f.generic_string()}, {"fnv1a64", text::hex64(text::fnv1a64(read_file(f)))}});
        }
    }
    return digests;
}

const char* fit_mode_name(zones::FitMode m) {
    switch (m) {
        case zones::FitMode::fixed: return "fixed";
        case zones::FitMode::lloyd: return "lloyd";
        case zones::FitMode::farthest_first: return "farthest_first";
    }
    return "fixed";
}

// Loads sessions, mapping failures onto exit codes. Returns nullopt and sets
// `status` on the first failure.
std::optional<Session> load_or_report(const fs::path& dir, int& status) {
    try {
        return ingest::load_session_dir(dir);
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        status = kParseFailure;
    } catch (const ingest::AssemblyError& e) {
        spdlog::error("{}", e.what());
        status = kAssemblyFailure;
    }
    return std::nullopt;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct SegmentWindows {
    std::size_t segment = 0;
    std::vector<zones::WindowDistribution> windows;
};

struct PlayerResult {
    PlayerMeta meta;
    preprocess::MissingReport series_report;
    preprocess::MissingReport alive_report;
    std::vector<SegmentWindows> segments;
    std::optional<zones::AveragedDistribution> average;
    std::vector<Point> gaze_points;  // valid alive samples after interpolation
    std::vector<std::size_t> gaze_zones;
    std::vector<input::FeatureRow> features;
};

void merge(preprocess::MissingReport& into, const preprocess::MissingReport& part) {
    into.total_samples += part.total_samples;
    into.missing_samples += part.missing_samples;
    into.interpolated_samples += part.interpolated_samples;
    for (const auto& [len, n] : part.gap_histogram) into.gap_histogram[len] += n;
    into.missing_fraction = into.total_samples
                                ? static_cast<double>(into.missing_samples) / static_cast<double>(into.total_samples)
                                : 0.0;
}

PlayerResult analyze_session(const Session& s, const zones::ZoneModel& model, const RunConfig& cfg) {
    PlayerResult r;
    r.meta = s.meta;
    r.series_report = preprocess::missing_stats(s.gaze);
    const auto alive = preprocess::extract_alive_segments(s.timeline, s.meta.player_id);
    const auto parts = preprocess::slice_by_intervals(s.gaze, alive);
    std::vector<zones::WindowDistribution> all;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto [filled, report] = preprocess::interpolate_gaps(parts[i]);
        merge(r.alive_report, report);
        const auto seq = zones::assign_zones(filled, model, alive[i]);
        for (std::size_t j = 0; j < seq.times.size(); ++j) r.gaze_zones.push_back(seq.zones[j]);
        for (const auto& g : filled.samples) {
            if (g.valid) r.gaze_points.push_back({g.x, g.y});
        }
        auto windows = zones::window_distributions(seq, model.size(), cfg.window_s, cfg.hop_s);
        all.insert(all.end(), windows.begin(), windows.end());
        r.segments.push_back({i, std::move(windows)});
    }
    if (!all.empty()) r.average = zones::average_distribution(all);
    r.features = input::round_features(s);
    return r;
}

void zone_header(std::ostringstream& os, std::size_t k, const char* prefix) {
    for (std::size_t z = 0; z < k; ++z) os << ',' << prefix << z + 1;
    os << '\n';
}

void zone_values(std::ostringstream& os, const std::vector<double>& v) {
    for (double x : v) os << ',' << format_number(x);
    os << '\n';
}

ordered_json missing_json(const preprocess::MissingReport& m) {
    ordered_json hist = ordered_json::object();
    for (const auto& [len, n] : m.gap_histogram) hist[std::to_string(len)] = n;
    return {{"total_samples", m.total_samples},
            {"missing_samples", m.missing_samples},
            {"missing_fraction", m.missing_fraction},
            {"interpolated_samples", m.interpolated_samples},
            {"remaining_fraction", m.remaining_fraction()},
            {"gap_histogram", hist}};
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<fs::path> expand_session_paths(const std::vector<fs::path>& paths) {
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        if (fs::is_directory(p) && !fs::exists(p / ingest::kMetaFile)) {
            std::vector<fs::path> children;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_directory() && fs::exists(entry.path() / ingest::kMetaFile)) children.push_back(entry.path());
            }
            if (!children.empty()) {
                std::sort(children.begin(), children.end());
                out.insert(out.end(), children.begin(), children.end());
                continue;
            }
        }
        out.push_back(p);
    }
    return out;
}

int cmd_ingest(const std::vector<fs::path>& paths, std::ostream& out, const std::optional<fs::path>& out_dir) {
    const auto sessions = expand_session_paths(paths);
    if (sessions.empty()) {
        spdlog::error("no session directories given");
        return kUsage;
    }
    int status = kOk;
    ordered_json summary = ordered_json::array();
    for (const auto& dir : sessions) {
        int st = kOk;
        auto s = load_or_report(dir, st);
        if (!s) {
            if (status == kOk) status = st;
            summary.push_back({{"path", dir.generic_string()}, {"ok", false}, {"exit", st}});
            continue;
        }
        const auto alive = preprocess::extract_alive_segments(s->timeline, s->meta.player_id);
        const auto missing = preprocess::missing_stats(s->gaze);
        summary.push_back({{"path", dir.generic_string()},
                           {"ok", true},
                           {"player_id", s->meta.player_id},
                           {"cohort", to_string(s->meta.cohort)},
                           {"rounds", s->timeline.rounds.size()},
                           {"events", s->timeline.events.size()},
                           {"alive_segments", alive.size()},
                           {"gaze_samples", s->gaze.samples.size()},
                           {"gaze_missing_fraction", missing.missing_fraction},
                           {"input_samples", s->input.size()},
                           {"beats", s->hrm ? ordered_json(s->hrm->beat_times.size()) : ordered_json(nullptr)},
                           {"violations", ordered_json::array()}});
    }
    const std::string text = summary.dump(2) + "\n";
    out << text;
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_file_atomic(*out_dir / "ingest_summary.json", text);
        ordered_json manifest = {{"tool", kToolVersion},
                                 {"command", "ingest"},
                                 {"sessions", ordered_json::array()},
                                 {"inputs", input_digests(sessions)}};
        for (const auto& d : sessions) manifest["sessions"].push_back(d.generic_string());
        write_file_atomic(*out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return status;
}

int cmd_analyze(const RunConfig& cfg) {
    if (!(cfg.window_s > 0.0) || !(cfg.hop_s > 0.0)) {
        spdlog::error("--window-s and --hop-s must be positive");
        return kUsage;
    }
    if (cfg.bandwidth && !(*cfg.bandwidth > 0.0)) {
        spdlog::error("--bandwidth must be positive");
        return kUsage;
    }
    const auto dirs = expand_session_paths(cfg.sessions);
    if (dirs.empty()) {
        spdlog::error("no session directories given");
        return kUsage;
    }

    std::optional<zones::ZoneModel> seeds;
    if (cfg.zones == "default") {
        seeds = zones::default_zone_model();
    } else {
        std::ifstream in(cfg.zones);
        if (!in) {
            spdlog::error("cannot open zone model {}", cfg.zones);
            return kUsage;
        }
        try {
            seeds = zones::read_zone_model(in);
        } catch (const ParseError& e) {
            spdlog::error("{}", e.with_source(cfg.zones).what());
            return kParseFailure;
        }
    }

    std::vector<Session> sessions(dirs.size());
    std::vector<int> load_status(dirs.size(), kOk);
    parallel_for(dirs.size(), cfg.jobs, [&](std::size_t i) {
        auto s = load_or_report(dirs[i], load_status[i]);
        if (s) sessions[i] = std::move(*s);
    });
    for (int st : load_status) {
        if (st != kOk) return st;
    }
    spdlog::info("loaded {} session(s)", sessions.size());

    zones::ZoneModel model = *seeds;
    if (cfg.zone_fit != zones::FitMode::fixed) {
        std::vector<Point> pts;
        for (const auto& s : sessions) {
            for (const auto& g : s.gaze.samples) {
                if (g.valid) pts.push_back({g.x, g.y});
            }
        }
        zones::FitOptions opt;
        opt.mode = cfg.zone_fit;
        opt.seeds = seeds;
        opt.seed = cfg.seed;
        try {
            model = zones::fit_zones(pts, seeds->size(), opt);
        } catch (const Error& e) {
            spdlog::error("zone fit failed: {}", e.what());
            return kDegeneratePca;
        }
    }
    const std::size_t k = model.size();

    std::vector<PlayerResult> results(sessions.size());
    parallel_for(sessions.size(), cfg.jobs,
                 [&](std::size_t i) { results[i] = analyze_session(sessions[i], model, cfg); });

    fs::create_directories(cfg.out);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file_atomic(cfg.out / name, content);
        written.push_back(name);
    };

    {
        std::ostringstream os;
        zones::write_zone_model(os, model);
        emit("zones.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "player_id,cohort,scope,total_samples,missing_samples,missing_fraction,interpolated_samples,"
              "remaining_fraction\n";
        for (const auto& r : results) {
            for (const auto& [scope, m] : {std::pair{"series", &r.series_report}, std::pair{"alive", &r.alive_report}}) {
                os << r.meta.player_id << ',' << to_string(r.meta.cohort) << ',' << scope << ',' << m->total_samples
                   << ',' << m->missing_samples << ',' << format_number(m->missing_fraction) << ','
                   << m->interpolated_samples << ',' << format_number(m->remaining_fraction()) << '\n';
            }
        }
        emit("missing_report.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "player_id,cohort,segment,window,window_start";
        zone_header(os, k, "p");
        for (const auto& r : results) {
            for (const auto& seg : r.segments) {
                for (const auto& w : seg.windows) {
                    os << r.meta.player_id << ',' << to_string(r.meta.cohort) << ',' << seg.segment << ','
                       << w.window_index << ',' << format_number(w.window_start);
                    zone_values(os, w.probs);
                }
            }
        }
        emit("windows.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "player_id,cohort,windows";
        zone_header(os, k, "p");
        for (const auto& r : results) {
            if (!r.average) continue;
            std::size_t n = 0;
            for (const auto& seg : r.segments) n += seg.windows.size();
            os << r.meta.player_id << ',' << to_string(r.meta.cohort) << ',' << n;
            zone_values(os, r.average->probs);
        }
        emit("averages.csv", os.str());
    }

    // Heatmaps, zone shares and scatter samples per cohort.
    std::map<Cohort, std::pair<std::vector<Point>, std::vector<std::size_t>>> by_cohort;
    for (const auto& r : results) {
        auto& [pts, zs] = by_cohort[r.meta.cohort];
        pts.insert(pts.end(), r.gaze_points.begin(), r.gaze_points.end());
        zs.insert(zs.end(), r.gaze_zones.begin(), r.gaze_zones.end());
    }
    {
        std::ostringstream shares;
        shares << "cohort,zone,label,share\n";
        for (const auto& [cohort, data] : by_cohort) {
            const auto& [pts, zs] = data;
            const std::string name = to_string(cohort);
            const auto screen = sessions.front().gaze.screen;
            const auto heat = zones::heatmap_grid(pts, screen);
            std::ostringstream csv, pgm;
            zones::write_heatmap_csv(csv, heat);
            zones::write_heatmap_pgm(pgm, heat);
            emit("heatmap_" + name + ".csv", csv.str());
            emit("heatmap_" + name + ".pgm", pgm.str());

            if (!zs.empty()) {
                zones::ZoneSequence seq;
                seq.zones = zs;
                const auto sh = zones::zone_shares(seq, k);
                for (std::size_t z = 0; z < k; ++z) {
                    shares << name << ',' << z + 1 << ',' << model.labels()[z] << ',' << format_number(sh[z]) << '\n';
                }
            }

            Xorshift64Star rng(cfg.seed ^ static_cast<std::uint64_t>(cohort));
            std::vector<std::size_t> idx(pts.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            const std::size_t take = std::min(kScatterSamples, idx.size());
            for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
            std::ostringstream scatter;
            scatter << "x,y,zone\n";
            for (std::size_t i = 0; i < take; ++i) {
                scatter << format_number(pts[idx[i]].x) << ',' << format_number(pts[idx[i]].y) << ','
                        << zs[idx[i]] + 1 << '\n';
            }
            emit("gaze_sample_" + name + ".csv", scatter.str());
        }
        emit("zone_shares.csv", shares.str());
    }

    {
        std::ostringstream os;
        os << "player_id,cohort,round,feature,value\n";
        for (const auto& r : results) {
            for (const auto& f : r.features) {
                os << f.player_id << ',' << to_string(f.cohort) << ',' << f.round << ',' << f.feature << ','
                   << format_number(f.value) << '\n';
            }
        }
        emit("features.csv", os.str());
    }
    ordered_json kde_meta = ordered_json::array();
    {
        std::ostringstream os;
        os << "feature,cohort,bandwidth,x,density\n";
        for (const char* feature : {input::kFeatureAd, input::kFeatureWMouse1}) {
            for (Cohort cohort : {Cohort::professional, Cohort::amateur}) {
                numerics::KdeModel kde;
                for (const auto& r : results) {
                    for (const auto& f : r.features) {
                        if (f.cohort == cohort && f.feature == feature) kde.samples.push_back(f.value);
                    }
                }
                if (kde.samples.empty()) continue;
                try {
                    kde.bandwidth = cfg.bandwidth ? *cfg.bandwidth : numerics::silverman_bandwidth(kde.samples);
                } catch (const Error& e) {
                    spdlog::warn("KDE for {} / {} skipped: {}", feature, to_string(cohort), e.what());
                    continue;
                }
                for (const auto& p : numerics::kde_curve(kde)) {
                    os << feature << ',' << to_string(cohort) << ',' << format_number(kde.bandwidth) << ','
                       << format_number(p.x) << ',' << format_number(p.density) << '\n';
                }
                double mean = 0.0;
                for (double v : kde.samples) mean += v;
                mean /= static_cast<double>(kde.samples.size());
                kde_meta.push_back({{"feature", feature},
                                    {"cohort", to_string(cohort)},
                                    {"observations", kde.samples.size()},
                                    {"mean", mean},
                                    {"bandwidth", kde.bandwidth}});
            }
        }
        emit("kde.csv", os.str());
    }

    int status = kOk;
    ordered_json pca_json = nullptr;
    if (results.size() < 2) {
        spdlog::warn("PCA skipped: it needs at least two sessions");
        pca_json = {{"skipped", "fewer than two sessions"}};
    } else {
        std::vector<std::vector<double>> rows;
        for (const auto& r : results) {
            for (const auto& seg : r.segments) {
                for (const auto& w : seg.windows) rows.push_back(w.probs);
            }
        }
        try {
            const auto pca = numerics::fit_pca(rows);
            std::ostringstream model_csv;
            model_csv << "row,explained_variance,explained_ratio";
            zone_header(model_csv, k, "z");
            model_csv << "mean,,";
            zone_values(model_csv, pca.mean);
            for (std::size_t c = 0; c < pca.components.size(); ++c) {
                model_csv << "pc" << c + 1 << ',' << format_number(pca.explained_variance[c]) << ','
                          << format_number(pca.explained_ratio[c]);
                zone_values(model_csv, pca.components[c]);
            }
            emit("pca_model.csv", model_csv.str());

            std::ostringstream proj;
            proj << "player_id,cohort,kind,segment,window,pc1,pc2\n";
            for (const auto& r : results) {
                for (const auto& seg : r.segments) {
                    for (const auto& w : seg.windows) {
                        const auto xy = numerics::project(pca, w.probs, 2);
                        proj << r.meta.player_id << ',' << to_string(r.meta.cohort) << ",window," << seg.segment << ','
                             << w.window_index << ',' << format_number(xy[0]) << ',' << format_number(xy[1]) << '\n';
                    }
                }
            }
            for (const auto& r : results) {
                if (!r.average) continue;
                const auto xy = numerics::project(pca, r.average->probs, 2);
                proj << r.meta.player_id << ',' << to_string(r.meta.cohort) << ",average,,," << format_number(xy[0])
                     << ',' << format_number(xy[1]) << '\n';
            }
            emit("pca_projections.csv", proj.str());

            pca_json = {{"windows", rows.size()}, {"components", ordered_json::array()}};
            for (std::size_t c = 0; c < std::min<std::size_t>(2, pca.components.size()); ++c) {
                const auto dom = numerics::dominant_coordinate(pca.components[c]);
                pca_json["components"].push_back(
                    {{"component", c + 1},
                     {"explained_ratio", pca.explained_ratio[c]},
                     {"dominant_zone", dom ? ordered_json(dom->first + 1) : ordered_json(nullptr)},
                     {"dominant_label", dom ? ordered_json(model.labels()[dom->first]) : ordered_json(nullptr)}});
            }
        } catch (const Error& e) {
            spdlog::error("PCA input is degenerate: {}", e.what());
            pca_json = {{"error", e.what()}};
            status = kDegeneratePca;
        }
    }

    ordered_json players = ordered_json::array();
    for (const auto& r : results) {
        players.push_back({{"player_id", r.meta.player_id},
                           {"cohort", to_string(r.meta.cohort)},
                           {"index", r.meta.index},
                           {"missing_series", missing_json(r.series_report)},
                           {"missing_alive", missing_json(r.alive_report)}});
    }
    ordered_json report = {{"players", players},
                           {"pca", pca_json},
                           {"kde", kde_meta},
                           {"notes",
                            {{"feature_unit", "per-round alive interval"},
                             {"w_mouse1_support", "alive time"},
                             {"window_boundaries", "windows never cross alive segments"}}}};
    emit("report.json", report.dump(2) + "\n");

    ordered_json config = {{"zones", cfg.zones},
                           {"zone_fit", fit_mode_name(cfg.zone_fit)},
                           {"window_s", cfg.window_s},
                           {"hop_s", cfg.hop_s},
                           {"bandwidth", cfg.bandwidth ? ordered_json(*cfg.bandwidth) : ordered_json("auto")},
                           {"seed", cfg.seed}};
    ordered_json manifest = {{"tool", kToolVersion},
                             {"command", "analyze"},
                             {"config", config},
                             {"sessions", ordered_json::array()},
                             {"inputs", input_digests(dirs)},
                             {"outputs", written}};
    for (const auto& d : dirs) manifest["sessions"].push_back(d.generic_string());
    write_file_atomic(cfg.out / "manifest.json", manifest.dump(2) + "\n");
    spdlog::info("wrote {} artifacts to {}", written.size() + 1, cfg.out.string());
    return status;
}

int cmd_synth(const std::string& profile, std::size_t count, std::uint64_t seed, const fs::path& out) {
    synth::ProfileSet set;
    try {
        set = profile == "default" ? synth::default_profile_set() : synth::read_profile_set(profile);
    } catch (const InvalidProfile& e) {
        spdlog::error("invalid profile: {}", e.what());
        return kParseFailure;
    }
    if (count == 0) return kOk;
    const auto dirs = synth::write_cohort(set, count, seed, out);
    ordered_json manifest = {{"tool", kToolVersion},
                             {"command", "synth"},
                             {"config", {{"profile", profile}, {"count", count}, {"seed", seed}}},
                             {"outputs", ordered_json::array()}};
    for (const auto& d : dirs) manifest["outputs"].push_back(d.filename().generic_string());
    write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    spdlog::info("wrote {} session(s) to {}", dirs.size(), out.string());
    return kOk;
}

}  // namespace etk::cli
