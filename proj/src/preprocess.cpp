#include "etk/preprocess.hpp"

#include <cmath>
#include <string>

namespace etk::preprocess {

namespace {

// Timestamps are stored with microsecond resolution; durations closer than
// this are treated as equal.
constexpr double kTimeTolerance = 1e-5;

bool in_round(const MatchTimeline& tl, std::size_t r, double t) {
    const Round& round = tl.rounds[r];
    if (t >= round.start_t && t < round.end_t) return true;
    const bool shares_end = r + 1 < tl.rounds.size() && tl.rounds[r + 1].start_t == round.end_t;
    return t == round.end_t && !shares_end;
}

}  // namespace

double MissingReport::remaining_fraction() const {
    if (total_samples == 0) return 0.0;
    return static_cast<double>(missing_samples - interpolated_samples) / static_cast<double>(total_samples);
}

std::vector<Interval> extract_alive_segments(const MatchTimeline& timeline, std::string_view player_id) {
    const auto& events = timeline.events;
    const bool known = std::any_of(events.begin(), events.end(), [&](const GameEvent& e) {
        return e.subject == player_id || (e.object && *e.object == player_id);
    });
    if (!known) throw UnknownPlayer("player `" + std::string(player_id) + "` does not appear in the timeline");

    std::vector<Interval> out;
    for (std::size_t r = 0; r < timeline.rounds.size(); ++r) {
        std::optional<double> spawn;
        std::optional<double> death;
        for (const auto& e : events) {
            if (e.subject != player_id || !in_round(timeline, r, e.t)) continue;
            if (!spawn && e.kind == EventKind::spawn) {
                spawn = e.t;
            } else if (spawn && !death && e.kind == EventKind::death) {
                death = e.t;
            }
        }
        if (!spawn) continue;
        const double end = death ? *death : timeline.rounds[r].end_t;
        if (end > *spawn) out.push_back({*spawn, end});
    }
    return out;
}

std::vector<GazeSeries> slice_by_intervals(const GazeSeries& series, std::span<const Interval> intervals) {
    auto parts = slice_by_intervals<GazeSample>(std::span<const GazeSample>(series.samples), intervals);
    std::vector<GazeSeries> out;
    out.reserve(parts.size());
    for (auto& p : parts) {
        out.push_back(GazeSeries{series.player, std::move(p), series.nominal_rate_hz, series.screen});
    }
    return out;
}

MissingReport missing_stats(const GazeSeries& series) {
    MissingReport report;
    const auto& s = series.samples;
    report.total_samples = s.size();
    std::size_t run = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i < s.size() && !s[i].valid) {
            ++run;
            continue;
        }
        if (run > 0) {
            report.missing_samples += run;
            report.gap_histogram[run] += 1;
            run = 0;
        }
    }
    if (report.total_samples > 0) {
        report.missing_fraction =
            static_cast<double>(report.missing_samples) / static_cast<double>(report.total_samples);
    }
    return report;
}

std::pair<GazeSeries, MissingReport> interpolate_gaps(const GazeSeries& segment, double max_gap_s) {
    MissingReport report = missing_stats(segment);
    GazeSeries out = segment;
    auto& s = out.samples;

    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i].valid) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !s[j].valid) ++j;
        // Invalid run is [i, j).
        const bool bracketed = i > 0 && j < s.size();
        const double span = s[j - 1].t - s[i].t;
        if (bracketed && span < max_gap_s - kTimeTolerance) {
            const GazeSample& a = s[i - 1];
            const GazeSample& b = s[j];
            const double dt = b.t - a.t;
            for (std::size_t k = i; k < j; ++k) {
                const double w = (s[k].t - a.t) / dt;
                s[k].x = a.x + w * (b.x - a.x);
                s[k].y = a.y + w * (b.y - a.y);
                s[k].valid = true;
            }
            report.interpolated_samples += j - i;
        }
        i = j;
    }
    return {std::move(out), std::move(report)};
}

std::vector<BpmSample> beats_to_bpm(const BeatSeries& beats, std::size_t window_beats) {
    if (window_beats < 2) throw std::invalid_argument("window_beats must be at least 2");
    const auto& t = beats.beat_times;
    if (t.size() < window_beats) {
        throw InsufficientData("need at least " + std::to_string(window_beats) + " beats, got " +
                               std::to_string(t.size()));
    }
    std::vector<BpmSample> out;
    out.reserve(t.size() - window_beats + 1);
    const double beats_in_window = static_cast<double>(window_beats - 1);
    for (std::size_t i = window_beats - 1; i < t.size(); ++i) {
        out.push_back({t[i], 60.0 * beats_in_window / (t[i] - t[i + 1 - window_beats])});
    }
    return out;
}

}  // namespace etk::preprocess
