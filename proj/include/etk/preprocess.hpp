#pragma once

#include "etk/errors.hpp"
#include "etk/model.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace etk::preprocess {

struct MissingReport {
    std::size_t total_samples = 0;
    std::size_t missing_samples = 0;
    double missing_fraction = 0.0;
    std::map<std::size_t, std::size_t> gap_histogram;  // run length in samples -> run count
    std::size_t interpolated_samples = 0;

    /// Fraction still missing after interpolation.
    double remaining_fraction() const;

    bool operator==(const MissingReport&) const = default;
};

struct BpmSample {
    double t = 0.0;
    double bpm = 0.0;
};

/// One interval per round the player spawned in: [spawn, death) or
/// [spawn, round end) if the player survived. Throws UnknownPlayer.
std::vector<Interval> extract_alive_segments(const MatchTimeline& timeline, std::string_view player_id);

/// Splits time-ordered samples (anything with a `t` member) into one segment
/// per interval, keeping start_t <= t < end_t.
template <class Sample>
std::vector<std::vector<Sample>> slice_by_intervals(std::span<const Sample> samples,
                                                    std::span<const Interval> intervals) {
    std::vector<std::vector<Sample>> out;
    out.reserve(intervals.size());
    const auto by_time = [](const Sample& s, double t) { return s.t < t; };
    for (const auto& iv : intervals) {
        auto first = std::lower_bound(samples.begin(), samples.end(), iv.start_t, by_time);
        auto last = std::lower_bound(first, samples.end(), iv.end_t, by_time);
        out.emplace_back(first, last);
    }
    return out;
}

/// GazeSeries flavour: every segment keeps the player, rate and screen.
std::vector<GazeSeries> slice_by_intervals(const GazeSeries& series, std::span<const Interval> intervals);

inline constexpr double kDefaultMaxGap = 0.1;

/// Linear interpolation of short dropout runs. A run of invalid samples is
/// filled when it is bracketed by valid samples and the time from its first
/// to its last missing sample is shorter than `max_gap_s` (at 60 Hz that is
/// at most 6 consecutive samples for 0.1 s). Other runs stay invalid.
std::pair<GazeSeries, MissingReport> interpolate_gaps(const GazeSeries& segment, double max_gap_s = kDefaultMaxGap);

MissingReport missing_stats(const GazeSeries& series);

/// Trailing-window heart rate: bpm = 60 (w - 1) / (t[i] - t[i - w + 1]).
std::vector<BpmSample> beats_to_bpm(const BeatSeries& beats, std::size_t window_beats = 4);

}  // namespace etk::preprocess
