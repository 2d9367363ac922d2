#pragma once

// Keyboard and mouse behaviour features from sampled key state.
//
// Every input sample stands for one nominal period [t, t + period) of held
// state, so durations on fixed-cadence logs are exact multiples of the period.

#include "etk/errors.hpp"
#include "etk/model.hpp"
#include "etk/zones.hpp"

#include <span>
#include <string>
#include <vector>

namespace etk::input {

struct HoldInterval {
    Key key = Key::W;
    Interval interval;
};

/// Maximal runs of consecutive samples holding `key`, as
/// [first sample t, t of the first sample after the run). A run reaching
/// the end of the data closes at the last t plus `period_s`.
std::vector<HoldInterval> key_hold_intervals(std::span<const InputSample> samples, Key key,
                                             double period_s = kDefaultInputPeriod);

enum class MatchMode { any, all };

/// Share of alive time during which the held keys match `keys`: `any` needs
/// one of them, `all` needs every one. Throws EmptySupport on zero alive time.
double fraction_held(std::span<const InputSample> samples, KeySet keys, std::span<const Interval> alive,
                     MatchMode mode, double period_s = kDefaultInputPeriod);

/// Held duration (seconds) inside `alive` matching `keys`.
double held_duration(std::span<const InputSample> samples, KeySet keys, std::span<const Interval> alive,
                     MatchMode mode, double period_s = kDefaultInputPeriod);

struct ClickStats {
    std::size_t click_count = 0;
    double mean_duration_s = 0.0;
    double clicks_per_minute = 0.0;
};

/// Clicks are hold intervals of `button` overlapping `alive`, with their
/// duration clipped to the alive part.
ClickStats click_stats(std::span<const InputSample> samples, Key button, std::span<const Interval> alive,
                       double period_s = kDefaultInputPeriod);

struct MouseKinematics {
    double path_mean_px = 0.0;
    double path_std_px = 0.0;
    double vel_mean_px_s = 0.0;
    double vel_std_px_s = 0.0;
};

/// Path length per window (alive intervals tiled from their start, windows
/// holding at least one sample) and speed per consecutive sample pair inside
/// one alive interval. Standard deviations divide by n - 1, and are 0 for a
/// single observation. Throws InsufficientData below two alive samples.
MouseKinematics mouse_kinematics(std::span<const InputSample> samples, std::span<const Interval> alive,
                                 double window_s = 1.0);

/// Normalised zone histogram of the mouse position at each click onset.
std::vector<double> click_zone_distribution(std::span<const InputSample> samples, Key button,
                                            const zones::ZoneModel& model);

struct FeatureRow {
    std::string player_id;
    Cohort cohort = Cohort::amateur;
    int round = 0;
    std::string feature;
    double value = 0.0;
};

inline constexpr const char* kFeatureAd = "ad_fraction";
inline constexpr const char* kFeatureWMouse1 = "w_mouse1_fraction";

/// Per-round feature table for one session: A/D and W+MOUSE1 hold fractions,
/// click statistics and mouse kinematics over each round's alive interval.
std::vector<FeatureRow> round_features(const Session& session);

}  // namespace etk::input
