#include "etk/input_features.hpp"

#include "etk/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace etk::input {

namespace {

// Length of [a, b) inside the union of sorted, disjoint alive intervals.
double overlap(double a, double b, std::span<const Interval> alive) {
    auto it = std::upper_bound(alive.begin(), alive.end(), a,
                               [](double t, const Interval& iv) { return t < iv.end_t; });
    double total = 0.0;
    for (; it != alive.end() && it->start_t < b; ++it) {
        const double lo = std::max(a, it->start_t);
        const double hi = std::min(b, it->end_t);
        if (hi > lo) total += hi - lo;
    }
    return total;
}

bool matches(KeySet held, KeySet keys, MatchMode mode) {
    return mode == MatchMode::any ? held.intersects(keys) : held.contains_all(keys);
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<HoldInterval> key_hold_intervals(std::span<const InputSample> samples, Key key, double period_s) {
    std::vector<HoldInterval> out;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].keys_down.contains(key)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < samples.size() && samples[j].keys_down.contains(key)) ++j;
        const double end = j < samples.size() ? samples[j].t : samples[j - 1].t + period_s;
        out.push_back({key, {samples[i].t, end}});
        i = j;
    }
    return out;
}

double held_duration(std::span<const InputSample> samples, KeySet keys, std::span<const Interval> alive,
                     MatchMode mode, double period_s) {
    double held = 0.0;
    for (const auto& s : samples) {
        if (matches(s.keys_down, keys, mode)) held += overlap(s.t, s.t + period_s, alive);
    }
    return held;
}

double fraction_held(std::span<const InputSample> samples, KeySet keys, std::span<const Interval> alive,
                     MatchMode mode, double period_s) {
    const double support = total_duration(alive);
    if (!(support > 0.0)) throw EmptySupport("alive intervals have zero total duration");
    return std::clamp(held_duration(samples, keys, alive, mode, period_s) / support, 0.0, 1.0);
}

ClickStats click_stats(std::span<const InputSample> samples, Key button, std::span<const Interval> alive,
                       double period_s) {
    const double support = total_duration(alive);
    if (!(support > 0.0)) throw EmptySupport("alive intervals have zero total duration");
    ClickStats stats;
    double total = 0.0;
    for (const auto& hold : key_hold_intervals(samples, button, period_s)) {
        const double d = overlap(hold.interval.start_t, hold.interval.end_t, alive);
        if (d <= 0.0) continue;
        ++stats.click_count;
        total += d;
    }
    if (stats.click_count > 0) stats.mean_duration_s = total / static_cast<double>(stats.click_count);
    stats.clicks_per_minute = static_cast<double>(stats.click_count) / (support / 60.0);
    return stats;
}

MouseKinematics mouse_kinematics(std::span<const InputSample> samples, std::span<const Interval> alive,
                                 double window_s) {
    if (!(window_s > 0.0)) throw std::invalid_argument("window_s must be positive");
    const auto segments = preprocess::slice_by_intervals(samples, alive);
    std::size_t inside = 0;
    for (const auto& seg : segments) inside += seg.size();
    if (inside < 2) throw InsufficientData("mouse kinematics need at least two samples inside alive time");

    std::vector<double> paths;
    std::vector<double> speeds;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& seg = segments[s];
        if (seg.empty()) continue;
        std::map<long long, double> per_window;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const auto w = static_cast<long long>(std::floor((seg[i].t - alive[s].start_t) / window_s));
            double& path = per_window[w];
            if (i + 1 == seg.size()) continue;
            const double step = std::hypot(seg[i + 1].mouse_x - seg[i].mouse_x, seg[i + 1].mouse_y - seg[i].mouse_y);
            path += step;
            speeds.push_back(step / (seg[i + 1].t - seg[i].t));
        }
        for (const auto& [w, path] : per_window) paths.push_back(path);
    }
    return MouseKinematics{mean_of(paths), sample_std(paths), mean_of(speeds), sample_std(speeds)};
}

std::vector<double> click_zone_distribution(std::span<const InputSample> samples, Key button,
                                            const zones::ZoneModel& model) {
    std::vector<double> dist(model.size(), 0.0);
    std::size_t clicks = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const bool down = samples[i].keys_down.contains(button);
        const bool onset = down && (i == 0 || !samples[i - 1].keys_down.contains(button));
        if (!onset) continue;
        dist[zones::assign_zone({samples[i].mouse_x, samples[i].mouse_y}, model)] += 1.0;
        ++clicks;
    }
    if (clicks > 0) {
        for (auto& d : dist) d /= static_cast<double>(clicks);
    }
    return dist;
}

std::vector<FeatureRow> round_features(const Session& session) {
    std::vector<FeatureRow> rows;
    const auto alive = preprocess::extract_alive_segments(session.timeline, session.meta.player_id);
    const double period = session.input_period_s;
    for (const auto& iv : alive) {
        int round = 0;
        for (const auto& r : session.timeline.rounds) {
            if (iv.start_t >= r.start_t && iv.start_t < r.end_t) round = r.index;
        }
        const std::span<const Interval> one(&iv, 1);
        auto emit = [&](const char* name, double value) {
            rows.push_back({session.meta.player_id, session.meta.cohort, round, name, value});
        };
        emit(kFeatureAd, fraction_held(session.input, {Key::A, Key::D}, one, MatchMode::any, period));
        emit(kFeatureWMouse1, fraction_held(session.input, {Key::W, Key::MOUSE1}, one, MatchMode::all, period));
        const auto clicks = click_stats(session.input, Key::MOUSE1, one, period);
        emit("click_count", static_cast<double>(clicks.click_count));
        emit("click_mean_duration_s", clicks.mean_duration_s);
        emit("clicks_per_minute", clicks.clicks_per_minute);
        try {
            const auto kin = mouse_kinematics(session.input, one);
            emit("mouse_path_mean_px", kin.path_mean_px);
            emit("mouse_path_std_px", kin.path_std_px);
            emit("mouse_vel_mean_px_s", kin.vel_mean_px_s);
            emit("mouse_vel_std_px_s", kin.vel_std_px_s);
        } catch (const InsufficientData&) {
            // too few samples in this round for kinematics
        }
    }
    return rows;
}

}  // namespace etk::input
