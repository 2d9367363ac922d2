#pragma once

// Small hand-built sessions and series shared by the unit tests.

#include "etk/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace etk::test {

inline PlayerMeta player(const std::string& id = "p1", Cohort cohort = Cohort::professional, int index = 1) {
    return PlayerMeta{id, cohort, index};
}

/// `n` valid samples at `rate_hz` starting at t0, all at (x, y).
inline GazeSeries constant_gaze(std::size_t n, double rate_hz = 60.0, double x = 960, double y = 540,
                                double t0 = 0.0) {
    GazeSeries g;
    g.player = player();
    g.nominal_rate_hz = rate_hz;
    for (std::size_t i = 0; i < n; ++i) g.samples.push_back({t0 + static_cast<double>(i) / rate_hz, x, y, true});
    return g;
}

/// Input samples every `period` seconds over [t0, t1), each holding `keys`.
inline std::vector<InputSample> held(double t0, double t1, KeySet keys, double period = 0.01) {
    std::vector<InputSample> out;
    for (long long i = 0;; ++i) {
        const double t = std::round((t0 + static_cast<double>(i) * period) * 1e6) / 1e6;
        if (t >= t1 - 1e-12) break;
        out.push_back({t, 0.0, 0.0, keys});
    }
    return out;
}

/// Rounds of `round_s` seconds; `player` spawns at each round start and dies
/// at deaths[r] when that entry is positive (seconds into the round).
inline MatchTimeline timeline(int rounds, double round_s, const std::string& id = "p1",
                              const std::vector<double>& deaths = {}) {
    MatchTimeline tl;
    for (int r = 0; r < rounds; ++r) {
        const double start = r * round_s;
        tl.rounds.push_back({r + 1, start, start + round_s});
        tl.events.push_back({start, EventKind::spawn, id, std::nullopt});
        if (static_cast<std::size_t>(r) < deaths.size() && deaths[r] > 0) {
            tl.events.push_back({start + deaths[r], EventKind::death, id, std::nullopt});
        }
    }
    return tl;
}

/// A small valid session: 2 rounds of 10 s, gaze at 60 Hz, input at 100 Hz.
inline Session small_session() {
    Session s;
    s.meta = player();
    s.gaze = constant_gaze(1200);
    s.gaze.player = s.meta;
    s.input = held(0.0, 20.0, {});
    s.timeline = timeline(2, 10.0, "p1", {6.0, 0.0});
    BeatSeries beats;
    beats.player = s.meta;
    for (int i = 0; i < 20; ++i) beats.beat_times.push_back(0.5 + i * 0.8);
    s.hrm = beats;
    return s;
}

}  // namespace etk::test
