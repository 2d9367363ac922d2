// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "oracles.hpp"

#include "etk/cli.hpp"
#include "etk/ingest.hpp"
#include "etk/input_features.hpp"
#include "etk/numerics.hpp"
#include "etk/preprocess.hpp"
#include "etk/random.hpp"
#include "etk/synth.hpp"
#include "etk/text.hpp"
#include "etk/zones.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace etk;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return out;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("etk_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

// ---------------------------------------------------------------------------

Outcome zone_table() {
    const std::vector<Point> expected{{960, 540}, {345, 815}, {310, 180}, {1205, 530}, {1610, 180},
                                      {715, 530}, {1575, 815}, {960, 260}, {960, 900}};
    const std::vector<std::string> labels{"Aiming Cross-hair",   "Radar Area",          "Armor & Health Bar",
                                          "Right Area of Sight", "Weapon & Ammo Panel", "Left Area of Sight",
                                          "Kill & Death Log",    "Bottom Area of Sight", "Timer & Players Panel"};
    const auto t0 = Clock::now();
    const auto model = zones::default_zone_model();
    bool own = true;
    for (std::size_t k = 0; k < model.size(); ++k) own = own && zones::assign_zone(model.centers()[k], model) == k;
    const double elapsed = seconds_since(t0);
    const bool exact = model.centers() == expected && model.labels() == labels;
    return {exact && own && elapsed < 1e-3,
            fmt("centers exact=%d, each center in its own zone=%d, %.1f us", exact, own, elapsed * 1e6)};
}

Outcome interpolation_rule() {
    // x = 600 t, y = 100 + 300 t at 60 Hz with runs of 2, 5 and 8 missing samples
    GazeSeries g;
    for (int i = 0; i < 120; ++i) {
        const double t = i / 60.0;
        g.samples.push_back({t, 600 * t, 100 + 300 * t, true});
    }
    const std::vector<std::pair<int, int>> gaps{{10, 2}, {30, 5}, {60, 8}};
    for (auto [first, n] : gaps) {
        for (int i = first; i < first + n; ++i) g.samples[i] = {g.samples[i].t, 0, 0, false};
    }
    const auto [out, report] = preprocess::interpolate_gaps(g, 0.1);
    double worst = 0.0;
    bool filled = true;
    for (auto [first, n] : {gaps[0], gaps[1]}) {
        for (int i = first; i < first + n; ++i) {
            const auto& s = out.samples[i];
            filled = filled && s.valid;
            worst = std::max({worst, std::abs(s.x - 600 * s.t), std::abs(s.y - (100 + 300 * s.t))});
        }
    }
    bool long_kept = true;
    for (int i = 60; i < 68; ++i) long_kept = long_kept && !out.samples[i].valid;
    return {filled && worst < 1e-9 && long_kept && report.interpolated_samples == 7,
            fmt("2 and 5 filled=%d (max error %.2e), 8 left invalid=%d", filled, worst, long_kept)};
}

Outcome distribution_invariants() {
    Xorshift64Star rng(20240601);
    std::size_t windows = 0, sessions = 0;
    double worst_sum = 0.0, worst_avg = 0.0;
    bool negative = false;
    while (windows < 10000) {
        zones::ZoneSequence seq;
        const double span = 15.0 + 30.0 * rng.uniform();
        const double rate = 5.0 + 55.0 * rng.uniform();
        seq.span = {0.0, span};
        const double stay = rng.uniform();
        std::size_t zone = rng.below(9);
        for (double t = 0.0; t < span; t += 1.0 / rate) {
            if (rng.uniform() < 0.05) continue;  // dropout
            if (rng.uniform() > stay) zone = rng.below(9);
            seq.times.push_back(t);
            seq.zones.push_back(zone);
        }
        const double window = 2.0 + 13.0 * rng.uniform();
        const double hop = 0.25 + 1.75 * rng.uniform();
        const auto w = zones::window_distributions(seq, 9, window, hop);
        if (w.empty()) continue;
        ++sessions;
        for (const auto& d : w) {
            double sum = 0.0;
            for (double p : d.probs) {
                sum += p;
                negative = negative || p < 0.0;
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
        const auto avg = zones::average_distribution(w);
        for (std::size_t k = 0; k < 9; ++k) {
            long double m = 0.0L;
            for (const auto& d : w) m += d.probs[k];
            m /= static_cast<long double>(w.size());
            worst_avg = std::max(worst_avg, static_cast<double>(std::abs(static_cast<long double>(avg.probs[k]) - m)));
        }
        windows += w.size();
    }
    return {worst_sum <= 1e-9 && !negative && worst_avg <= 1e-12,
            fmt("%zu windows over %zu sequences, max |sum-1| %.1e, max |avg-mean| %.1e, negatives=%d", windows,
                sessions, worst_sum, worst_avg, negative)};
}

Outcome pca_correctness() {
    double ortho = 0.0, trace_err = 0.0, recon = 0.0, eig_err = 0.0, vec_err = 0.0;
    const int datasets = 20;
    for (int d = 0; d < datasets; ++d) {
        Xorshift64Star rng(1000 + d);
        std::vector<std::vector<double>> rows(200, std::vector<double>(9));
        if (d % 2 == 0) {
            // probability vectors, like window distributions
            std::vector<double> bias(9);
            for (auto& b : bias) b = 0.2 + 3.0 * rng.uniform();
            for (auto& r : rows) {
                double s = 0.0;
                for (std::size_t j = 0; j < 9; ++j) s += (r[j] = bias[j] * rng.uniform());
                for (auto& x : r) x /= s;
            }
        } else {
            std::vector<double> scale(9);
            for (auto& s : scale) s = 0.1 + 2.0 * rng.uniform();
            for (auto& r : rows) {
                const double common = rng.normal();
                for (std::size_t j = 0; j < 9; ++j) r[j] = scale[j] * rng.normal() + 0.5 * common * (j % 2);
            }
        }
        const auto model = numerics::fit_pca(rows);
        const auto cov = test::population_covariance(rows);
        const auto oracle = test::max_pivot_jacobi(cov);
        double trace = 0.0, total = 0.0;
        for (std::size_t i = 0; i < 9; ++i) {
            trace += cov[i][i];
            total += model.explained_variance[i];
            for (std::size_t j = 0; j < 9; ++j) {
                double dot = 0.0;
                for (std::size_t c = 0; c < 9; ++c) dot += model.components[i][c] * model.components[j][c];
                ortho = std::max(ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
            eig_err = std::max(eig_err, std::abs(model.explained_variance[i] - std::max(0.0, oracle.values[i])));
            // same sign convention for the oracle vector
            auto v = oracle.vectors[i];
            std::size_t big = 0;
            for (std::size_t c = 1; c < 9; ++c) {
                if (std::abs(v[c]) > std::abs(v[big])) big = c;
            }
            if (v[big] < 0) {
                for (auto& x : v) x = -x;
            }
            for (std::size_t c = 0; c < 9; ++c) vec_err = std::max(vec_err, std::abs(v[c] - model.components[i][c]));
        }
        trace_err = std::max(trace_err, std::abs(total - trace));
        for (const auto& r : rows) {
            const auto coords = numerics::project(model, r, 9);
            for (std::size_t c = 0; c < 9; ++c) {
                double back = model.mean[c];
                for (std::size_t i = 0; i < 9; ++i) back += coords[i] * model.components[i][c];
                recon = std::max(recon, std::abs(back - r[c]));
            }
        }
    }
    const bool ok = ortho < 1e-9 && trace_err < 1e-9 && recon < 1e-9 && eig_err < 1e-9 && vec_err < 1e-9;
    return {ok, fmt("%d datasets n=200 K=9: orthonormality %.1e, trace %.1e, reconstruction %.1e, "
                    "oracle eigenvalues %.1e, oracle vectors %.1e",
                    datasets, ortho, trace_err, recon, eig_err, vec_err)};
}

// Shared by the cohort criteria: 5 professional and 10 amateur sessions.
struct Cohort15 {
    fs::path dir;
    std::vector<Session> sessions;
    double build_s = 0.0;
};

constexpr std::uint64_t kCohortSeed = 1;

const Cohort15& cohort15() {
    static const Cohort15 c = [] {
        Cohort15 out;
        const auto t0 = Clock::now();
        out.dir = scratch("cohort");
        for (const auto& d : synth::write_cohort(synth::default_profile_set(), 15, kCohortSeed, out.dir)) {
            out.sessions.push_back(ingest::load_session_dir(d));
        }
        out.build_s = seconds_since(t0);
        return out;
    }();
    return c;
}

Outcome cohort_pca() {
    const auto& c = cohort15();
    const auto t0 = Clock::now();
    const auto model = zones::default_zone_model();
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<Cohort, std::vector<double>>> averages;
    int pros = 0;
    for (const auto& s : c.sessions) {
        pros += s.meta.cohort == Cohort::professional;
        const auto alive = preprocess::extract_alive_segments(s.timeline, s.meta.player_id);
        const auto parts = preprocess::slice_by_intervals(s.gaze, alive);
        std::vector<zones::WindowDistribution> all;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto filled = preprocess::interpolate_gaps(parts[i]).first;
            const auto w = zones::window_distributions(zones::assign_zones(filled, model, alive[i]), model.size());
            all.insert(all.end(), w.begin(), w.end());
        }
        for (const auto& w : all) rows.push_back(w.probs);
        averages.emplace_back(s.meta.cohort, zones::average_distribution(all).probs);
    }
    const auto pca = numerics::fit_pca(rows);
    const auto d1 = numerics::dominant_coordinate(pca.components[0]);
    const auto d2 = numerics::dominant_coordinate(pca.components[1]);
    double pro_lo = INFINITY, pro_hi = -INFINITY, am_lo = INFINITY, am_hi = -INFINITY;
    for (const auto& [cohort, avg] : averages) {
        const double x = numerics::project(pca, avg, 1)[0];
        auto& lo = cohort == Cohort::professional ? pro_lo : am_lo;
        auto& hi = cohort == Cohort::professional ? pro_hi : am_hi;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double margin = std::max(pro_lo - am_hi, am_lo - pro_hi);
    const double elapsed = c.build_s + seconds_since(t0);
    const bool zones_ok = d1 && d1->first == 0 && d2 && d2->first == 1;
    auto ratio = [](const std::vector<double>& v) {
        std::vector<double> a;
        for (double x : v) a.push_back(std::abs(x));
        std::sort(a.rbegin(), a.rend());
        return a[0] / a[1];
    };
    return {zones_ok && margin > 0 && elapsed < 30.0 && pros == 5 && c.sessions.size() == 15,
            fmt("%zu windows, PC1 dominant zone %d (x%.2f), PC2 dominant zone %d (x%.2f), explained %.3f/%.3f, "
                "PC1 cohort margin %.4f, %.2f s",
                rows.size(), d1 ? static_cast<int>(d1->first) + 1 : 0, ratio(pca.components[0]),
                d2 ? static_cast<int>(d2->first) + 1 : 0, ratio(pca.components[1]), pca.explained_ratio[0],
                pca.explained_ratio[1], margin, elapsed)};
}

Outcome cohort_inputs() {
    const auto& c = cohort15();
    const auto [pro, am] = synth::default_profiles();
    std::map<std::pair<Cohort, std::string>, std::pair<double, int>> acc;
    for (const auto& s : c.sessions) {
        for (const auto& row : input::round_features(s)) {
            if (row.feature != input::kFeatureAd && row.feature != input::kFeatureWMouse1) continue;
            auto& a = acc[{row.cohort, row.feature}];
            a.first += row.value;
            a.second += 1;
        }
    }
    auto mean = [&](Cohort co, const char* f) {
        const auto& a = acc[{co, f}];
        return a.first / a.second;
    };
    const double ad_gap = mean(Cohort::professional, input::kFeatureAd) - mean(Cohort::amateur, input::kFeatureAd);
    const double wm_gap =
        mean(Cohort::amateur, input::kFeatureWMouse1) - mean(Cohort::professional, input::kFeatureWMouse1);
    const double ad_target = pro.ad_hold_rate - am.ad_hold_rate;
    const double wm_target = am.w_m1_rate - pro.w_m1_rate;
    const double ad_rel = std::abs(ad_gap - ad_target) / ad_target;
    const double wm_rel = std::abs(wm_gap - wm_target) / wm_target;
    return {ad_gap > 0 && wm_gap > 0 && ad_rel <= 0.2 && wm_rel <= 0.2,
            fmt("A/D gap %.4f vs %.2f (rel %.3f), W+MOUSE1 gap %.4f vs %.2f (rel %.3f)", ad_gap, ad_target, ad_rel,
                wm_gap, wm_target, wm_rel)};
}

Outcome kde_normalization() {
    // Judged on mean +- 8h as stated. The integral over [min - 8h, max + 8h]
    // is reported alongside to separate truncation from normalization.
    Xorshift64Star rng(77);
    double worst = 0.0, worst_full = 0.0, reach = 0.0;
    for (int set = 0; set < 50; ++set) {
        std::vector<double> s(10 + rng.below(51));
        const double loc = 100.0 * (rng.uniform() - 0.5), scale = 0.01 + 10.0 * rng.uniform();
        for (auto& x : s) x = loc + scale * rng.normal();
        const numerics::KdeModel model{s, numerics::silverman_bandwidth(s)};
        double mean = 0.0;
        for (double x : s) mean += x / static_cast<double>(s.size());
        const double h = model.bandwidth;
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        const auto density = [&](double x) { return numerics::kde_evaluate(model, x); };
        worst = std::max(worst, std::abs(test::trapezoid(density, mean - 8 * h, mean + 8 * h, h / 50) - 1.0));
        worst_full = std::max(worst_full, std::abs(test::trapezoid(density, *lo - 8 * h, *hi + 8 * h, h / 50) - 1.0));
        reach = std::max({reach, (mean - *lo) / h, (*hi - mean) / h});
    }
    const double spot = numerics::kde_evaluate({{0.0}, 1.0}, 0.0);
    const double spot_err = std::abs(spot - 1.0 / std::sqrt(2.0 * std::numbers::pi));
    return {worst <= 1e-3 && spot_err <= 1e-6,
            fmt("50 sets, max |integral-1| over mean+-8h %.2e (samples reach %.1fh from the mean), "
                "over [min-8h, max+8h] %.2e; density at 0 = %.6f (error %.1e)",
                worst, reach, worst_full, spot, spot_err)};
}

Outcome round_trip() {
    const auto set = synth::default_profile_set();
    bool identical = true;
    std::string first_diff;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = scratch("rt_a"), b = scratch("rt_b");
        Xorshift64Star pick(seed);
        const auto dirs = synth::write_cohort(set, 1 + pick.below(3), 1000 + seed * 7919, a);
        for (const auto& d : dirs) {
            const auto s = ingest::load_session_dir(d);
            ingest::save_session_dir(s, b / d.filename());
        }
        const auto ta = tree(a), tb = tree(b);
        for (const auto& [name, bytes] : tb) {
            const auto it = ta.find(name);
            if (it == ta.end() || it->second != bytes) {
                identical = false;
                if (first_diff.empty()) first_diff = name;
            }
        }
        for (const char* f : {"gaze.csv", "input.csv", "hrm.txt", "demo.events"}) {
            identical = identical && tb.count(dirs.front().filename().string() + "/" + f) == 1;
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }
    return {identical, identical ? "10 seeds, all files byte-identical after ingest and re-serialization"
                                 : "first difference in " + first_diff};
}

Outcome missingness() {
    const auto [pro, am] = synth::default_profiles();
    double worst = 0.0;
    std::string detail;
    int n = 0;
    for (const auto* p : {&pro, &am}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto s = synth::generate_session(*p, {"p" + std::to_string(++n), p->cohort, n}, seed);
            const double f = preprocess::missing_stats(s.gaze).missing_fraction;
            worst = std::max(worst, std::abs(f - p->missing_rate));
            if (s.timeline.rounds.size() != 12) return {false, "session does not have 12 rounds"};
        }
    }
    return {worst <= 0.01 && pro.missing_rate == 0.04 && am.missing_rate == 0.04,
            fmt("10 full 12-round sessions at missing_rate 0.04, max |fraction-0.04| %.4f", worst)};
}

Outcome bpm_derivation() {
    std::ostringstream file;
    for (int i = 0; i < 200; ++i) file << etk::text::format_number(0.5 * i + 3.0) << '\n';
    std::istringstream in(file.str());
    const auto beats = ingest::parse_hrm_log(in);
    const auto bpm = preprocess::beats_to_bpm(beats);
    bool exact = bpm.size() == 197;
    for (const auto& b : bpm) exact = exact && b.bpm == 120.0;
    return {exact, fmt("%zu samples, all exactly 120=%d", bpm.size(), exact)};
}

Outcome analyze_determinism() {
    const auto& c = cohort15();
    cli::RunConfig cfg;
    cfg.sessions = {c.dir};
    cfg.jobs = 4;
    cfg.seed = 9;
    cfg.out = scratch("analyze_1");
    const int s1 = cli::cmd_analyze(cfg);
    const auto first = tree(cfg.out);
    fs::remove_all(cfg.out);
    const int s2 = cli::cmd_analyze(cfg);
    const auto second = tree(cfg.out);
    fs::remove_all(cfg.out);
    const bool same = first == second && !first.empty();
    return {s1 == 0 && s2 == 0 && same, fmt("exit %d/%d, %zu files, identical=%d", s1, s2, first.size(), same)};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"zone table fidelity", zone_table},
        {"gap interpolation rule", interpolation_rule},
        {"window distribution invariants", distribution_invariants},
        {"PCA correctness", pca_correctness},
        {"cohort gaze PCA", cohort_pca},
        {"cohort input features", cohort_inputs},
        {"KDE normalization", kde_normalization},
        {"file round trip", round_trip},
        {"missingness accounting", missingness},
        {"BPM derivation", bpm_derivation},
        {"analyze determinism", analyze_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %-32s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(scratch("cohort"));
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
