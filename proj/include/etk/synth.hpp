#pragma once

// Seeded synthetic sessions. Gaze follows a zone-level dwell process: each
// sample stays in the current zone with probability `dwell_persistence`,
// otherwise a zone is redrawn from `zone_dwell`, so `zone_dwell` is the
// stationary occupancy. Inputs are drawn from a similar process over movement
// states (idle, strafe, run, run-and-shoot, shoot).

#include "etk/errors.hpp"
#include "etk/model.hpp"
#include "etk/zones.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace etk::synth {

struct CohortProfile {
    Cohort cohort = Cohort::amateur;
    std::vector<double> zone_dwell;  // one entry per zone, sums to 1
    double dwell_persistence = 0.95;
    double gaze_noise_px = 30.0;
    double missing_rate = 0.04;
    double ad_hold_rate = 0.2;  // share of time strafing with A or D
    double w_m1_rate = 0.1;     // share of time holding W and MOUSE1 together
    double bpm_base = 80.0;
};

struct Scenario {
    int rounds = 12;
    double round_s = 40.0;
    double gaze_rate_hz = 60.0;
    double input_period_s = kDefaultInputPeriod;
    ScreenDims screen;
    double missing_run_mean = 3.0;  // mean dropout run length in samples
    double death_probability = 0.5;
};

/// Throws InvalidProfile describing the first broken constraint.
void validate_profile(const CohortProfile& profile, std::size_t zone_count);

/// Professional and amateur defaults for the nine default zones. The
/// professional spends more time on the crosshair, less on the radar, strafes
/// more and runs-and-guns less.
std::pair<CohortProfile, CohortProfile> default_profiles();

/// Generates one session for player `meta` deterministically from `seed`.
Session generate_session(const CohortProfile& profile, const PlayerMeta& meta, std::uint64_t seed,
                         const Scenario& scenario = {}, const zones::ZoneModel& model = zones::default_zone_model());

CohortProfile profile_from_json(const std::string& json_text);
std::string profile_to_json(const CohortProfile& profile);

/// A profile file: one profile, or `{"professional": {...}, "amateur": {...},
/// "professional_fraction": f}`.
struct ProfileSet {
    std::vector<CohortProfile> profiles;  // professional first when both exist
    double professional_fraction = 1.0 / 3.0;
};

ProfileSet default_profile_set();
ProfileSet read_profile_set(const std::filesystem::path& path);

/// Writes `count` session directories named after their player ids and
/// returns the directories. Player k (1-based) gets seed mix(seed, k).
std::vector<std::filesystem::path> write_cohort(const ProfileSet& set, std::size_t count, std::uint64_t seed,
                                                const std::filesystem::path& out_dir, const Scenario& scenario = {});

}  // namespace etk::synth
