#include "etk/synth.hpp"

#include "etk/ingest.hpp"
#include "etk/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace etk::synth {

namespace {

// Rounds to a decimal grid; dividing by the scale yields the double nearest
// the decimal value, which prints back in its short form.
double quantize(double t, double scale) { return std::round(t * scale) / scale; }

// Gaze and beats are stored at microsecond resolution, events at millisecond.
constexpr double kMicro = 1e6;
constexpr double kMilli = 1e3;

std::size_t draw(Xorshift64Star& rng, const std::vector<double>& probs) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        u -= probs[i];
        if (u < 0.0) return i;
    }
    // Rounding left a sliver; take the last non-zero entry.
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) return i;
    }
    return 0;
}

std::uint64_t player_seed(std::uint64_t seed, std::size_t k) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (k + 1));
    return splitmix64(state);
}

enum class Move { idle, strafe, run, run_shoot, shoot };

std::vector<double> move_distribution(const CohortProfile& p) {
    const double rest = 1.0 - p.ad_hold_rate - p.w_m1_rate;
    return {0.6 * rest, p.ad_hold_rate, 0.25 * rest, p.w_m1_rate, 0.15 * rest};
}

void gen_gaze(Session& s, const CohortProfile& p, const Scenario& sc, const zones::ZoneModel& model,
              Xorshift64Star& rng) {
    const double total = sc.rounds * sc.round_s;
    const auto n = static_cast<std::size_t>(std::floor(total * sc.gaze_rate_hz - 1e-9)) + 1;

    // Two-state dropout chain with stationary invalid share = missing_rate
    // and geometric runs of mean missing_run_mean samples.
    const double leave_missing = 1.0 / sc.missing_run_mean;
    const double enter_missing = p.missing_rate >= 1.0 ? 1.0
                                                       : std::min(1.0, p.missing_rate * leave_missing /
                                                                           (1.0 - p.missing_rate));
    bool missing = rng.bernoulli(p.missing_rate);
    std::size_t zone = draw(rng, p.zone_dwell);

    s.gaze.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = quantize(static_cast<double>(i) / sc.gaze_rate_hz, kMicro);
        if (i > 0) {
            if (!rng.bernoulli(p.dwell_persistence)) zone = draw(rng, p.zone_dwell);
            if (p.missing_rate >= 1.0) missing = true;
            else if (missing) missing = !rng.bernoulli(leave_missing);
            else missing = rng.bernoulli(enter_missing);
        }
        const Point c = model.centers()[zone];
        const double x = std::clamp(std::round(c.x + p.gaze_noise_px * rng.normal()), 0.0,
                                    static_cast<double>(sc.screen.width));
        const double y = std::clamp(std::round(c.y + p.gaze_noise_px * rng.normal()), 0.0,
                                    static_cast<double>(sc.screen.height));
        if (missing) s.gaze.samples.push_back({t, 0.0, 0.0, false});
        else s.gaze.samples.push_back({t, x, y, true});
    }
}

void gen_input(Session& s, const CohortProfile& p, const Scenario& sc, Xorshift64Star& rng) {
    constexpr double kMovePersistence = 0.97;
    constexpr double kMouseStepPx = 4.0;
    const auto moves = move_distribution(p);
    const double total = sc.rounds * sc.round_s;
    const auto n = static_cast<std::size_t>(std::floor(total / sc.input_period_s - 1e-9)) + 1;

    auto move = static_cast<Move>(draw(rng, moves));
    bool left = rng.bernoulli(0.5);
    double mx = sc.screen.width / 2.0;
    double my = sc.screen.height / 2.0;
    s.input.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !rng.bernoulli(kMovePersistence)) {
            move = static_cast<Move>(draw(rng, moves));
            left = rng.bernoulli(0.5);
        }
        mx = std::clamp(mx + kMouseStepPx * rng.normal(), 0.0, static_cast<double>(sc.screen.width));
        my = std::clamp(my + kMouseStepPx * rng.normal(), 0.0, static_cast<double>(sc.screen.height));
        InputSample in;
        in.t = quantize(static_cast<double>(i) * sc.input_period_s, kMicro);
        in.mouse_x = std::round(mx);
        in.mouse_y = std::round(my);
        switch (move) {
            case Move::idle: break;
            case Move::strafe: in.keys_down.insert(left ? Key::A : Key::D); break;
            case Move::run: in.keys_down.insert(Key::W); break;
            case Move::run_shoot: in.keys_down = {Key::W, Key::MOUSE1}; break;
            case Move::shoot: in.keys_down.insert(Key::MOUSE1); break;
        }
        s.input.push_back(in);
    }
}

void gen_beats(Session& s, const CohortProfile& p, const Scenario& sc, Xorshift64Star& rng) {
    const double total = sc.rounds * sc.round_s;
    const double ibi = 60.0 / p.bpm_base;
    BeatSeries beats;
    double t = rng.uniform() * ibi;
    while (t < total) {
        const double q = quantize(t, kMicro);
        if (beats.beat_times.empty() || q - beats.beat_times.back() > kMinBeatInterval) beats.beat_times.push_back(q);
        t += std::clamp(ibi * (1.0 + 0.03 * rng.normal()), 0.3, 2.0);
    }
    s.hrm = std::move(beats);
}

void gen_timeline(Session& s, const Scenario& sc, Xorshift64Star& rng) {
    static const char* const kOthers[] = {"mate1", "mate2", "enemy1", "enemy2"};
    const std::string& me = s.meta.player_id;
    for (int r = 0; r < sc.rounds; ++r) {
        const double start = r * sc.round_s;
        const double end = start + sc.round_s;
        s.timeline.rounds.push_back({r + 1, start, end});

        std::vector<GameEvent> ev;
        ev.push_back({start, EventKind::spawn, me, std::nullopt});
        for (const char* o : kOthers) ev.push_back({start, EventKind::spawn, o, std::nullopt});

        // One enemy may kill the player, the other may be killed by them.
        const auto killer_slot = rng.below(2);
        double alive_until = end;
        if (rng.bernoulli(sc.death_probability)) {
            alive_until = quantize(start + 5.0 + rng.uniform() * (sc.round_s - 7.0), kMilli);
            const char* killer = kOthers[2 + killer_slot];
            ev.push_back({alive_until, EventKind::kill, killer, me});
            ev.push_back({alive_until, EventKind::death, me, std::nullopt});
        }
        const auto fires = 2 + rng.below(4);
        for (std::uint64_t f = 0; f < fires; ++f) {
            const double t = quantize(start + 1.0 + rng.uniform() * (alive_until - start - 1.0), kMilli);
            ev.push_back({t, EventKind::weapon_fire, me, std::nullopt});
        }
        if (rng.bernoulli(0.5)) {
            const double t = quantize(start + 1.0 + rng.uniform() * (alive_until - start - 1.0), kMilli);
            const char* victim = kOthers[3 - killer_slot];
            ev.push_back({t, EventKind::kill, me, std::string(victim)});
            ev.push_back({t, EventKind::death, victim, std::nullopt});
        }
        std::stable_sort(ev.begin(), ev.end(), [](const GameEvent& a, const GameEvent& b) { return a.t < b.t; });
        // Events at the round end would read as the next round's.
        for (auto& e : ev) e.t = std::min(e.t, quantize(end - 1.0 / kMilli, kMilli));
        s.timeline.events.insert(s.timeline.events.end(), ev.begin(), ev.end());
    }
}

double get_number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw InvalidProfile(std::string("`") + key + "` must be a number");
    return j[key].get<double>();
}

CohortProfile profile_from(const nlohmann::json& j, std::optional<Cohort> cohort_hint) {
    if (!j.is_object()) throw InvalidProfile("profile must be a JSON object");
    CohortProfile p;
    if (j.contains("cohort")) {
        if (!j["cohort"].is_string()) throw InvalidProfile("`cohort` must be a string");
        auto c = cohort_from_string(j["cohort"].get<std::string>());
        if (!c) throw InvalidProfile("`cohort` must be `professional` or `amateur`");
        p.cohort = *c;
    } else if (cohort_hint) {
        p.cohort = *cohort_hint;
    }
    if (!j.contains("zone_dwell") || !j["zone_dwell"].is_array()) throw InvalidProfile("`zone_dwell` array required");
    for (const auto& v : j["zone_dwell"]) {
        if (!v.is_number()) throw InvalidProfile("`zone_dwell` entries must be numbers");
        p.zone_dwell.push_back(v.get<double>());
    }
    p.dwell_persistence = get_number(j, "dwell_persistence", p.dwell_persistence);
    p.gaze_noise_px = get_number(j, "gaze_noise_px", p.gaze_noise_px);
    p.missing_rate = get_number(j, "missing_rate", p.missing_rate);
    p.ad_hold_rate = get_number(j, "ad_hold_rate", p.ad_hold_rate);
    p.w_m1_rate = get_number(j, "w_m1_rate", p.w_m1_rate);
    p.bpm_base = get_number(j, "bpm_base", p.bpm_base);
    return p;
}

nlohmann::json profile_json(const CohortProfile& p) {
    return {{"cohort", to_string(p.cohort)},
            {"zone_dwell", p.zone_dwell},
            {"dwell_persistence", p.dwell_persistence},
            {"gaze_noise_px", p.gaze_noise_px},
            {"missing_rate", p.missing_rate},
            {"ad_hold_rate", p.ad_hold_rate},
            {"w_m1_rate", p.w_m1_rate},
            {"bpm_base", p.bpm_base}};
}

}  // namespace

void validate_profile(const CohortProfile& p, std::size_t zone_count) {
    if (p.zone_dwell.size() != zone_count) {
        throw InvalidProfile("zone_dwell has " + std::to_string(p.zone_dwell.size()) + " entries, expected " +
                             std::to_string(zone_count));
    }
    double sum = 0.0;
    for (double v : p.zone_dwell) {
        if (!(v >= 0.0)) throw InvalidProfile("zone_dwell entries must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidProfile("zone_dwell must sum to 1");
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidProfile(std::string(name) + " must lie in [0, 1]");
    };
    unit(p.missing_rate, "missing_rate");
    unit(p.ad_hold_rate, "ad_hold_rate");
    unit(p.w_m1_rate, "w_m1_rate");
    if (!(p.dwell_persistence >= 0.0 && p.dwell_persistence < 1.0)) {
        throw InvalidProfile("dwell_persistence must lie in [0, 1)");
    }
    if (p.ad_hold_rate + p.w_m1_rate > 1.0) throw InvalidProfile("ad_hold_rate + w_m1_rate exceeds 1");
    if (!(p.gaze_noise_px >= 0.0)) throw InvalidProfile("gaze_noise_px must be non-negative");
    // Beats closer than 0.25 s are rejected on ingest, so stay well below 240 bpm.
    if (!(p.bpm_base >= 20.0 && p.bpm_base <= 200.0)) throw InvalidProfile("bpm_base must lie in [20, 200]");
}

std::pair<CohortProfile, CohortProfile> default_profiles() {
    CohortProfile pro;
    pro.cohort = Cohort::professional;
    pro.zone_dwell = {0.74, 0.07, 0.02, 0.04, 0.02, 0.04, 0.02, 0.03, 0.02};
    pro.dwell_persistence = 0.95;
    pro.gaze_noise_px = 30.0;
    pro.missing_rate = 0.04;
    pro.ad_hold_rate = 0.35;
    pro.w_m1_rate = 0.05;
    pro.bpm_base = 75.0;

    CohortProfile am;
    am.cohort = Cohort::amateur;
    am.zone_dwell = {0.44, 0.16, 0.05, 0.07, 0.05, 0.07, 0.05, 0.06, 0.05};
    am.dwell_persistence = 0.95;
    am.gaze_noise_px = 30.0;
    am.missing_rate = 0.04;
    am.ad_hold_rate = 0.15;
    am.w_m1_rate = 0.20;
    am.bpm_base = 85.0;
    return {pro, am};
}

Session generate_session(const CohortProfile& profile, const PlayerMeta& meta, std::uint64_t seed,
                         const Scenario& scenario, const zones::ZoneModel& model) {
    validate_profile(profile, model.size());
    if (scenario.rounds < 1 || !(scenario.round_s > 0.0) || !(scenario.gaze_rate_hz > 0.0) ||
        !(scenario.input_period_s > 0.0) || !(scenario.missing_run_mean >= 1.0)) {
        throw InvalidProfile("invalid scenario");
    }
    Session s;
    s.meta = meta;
    s.gaze.player = meta;
    s.gaze.nominal_rate_hz = scenario.gaze_rate_hz;
    s.gaze.screen = scenario.screen;
    s.input_period_s = scenario.input_period_s;

    std::uint64_t stream = seed;
    Xorshift64Star gaze_rng(splitmix64(stream));
    Xorshift64Star input_rng(splitmix64(stream));
    Xorshift64Star beat_rng(splitmix64(stream));
    Xorshift64Star event_rng(splitmix64(stream));
    gen_gaze(s, profile, scenario, model, gaze_rng);
    gen_input(s, profile, scenario, input_rng);
    gen_beats(s, profile, scenario, beat_rng);
    s.hrm->player = meta;
    gen_timeline(s, scenario, event_rng);
    return s;
}

CohortProfile profile_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidProfile(std::string("malformed profile JSON: ") + e.what());
    }
    return profile_from(j, std::nullopt);
}

std::string profile_to_json(const CohortProfile& profile) { return profile_json(profile).dump(2); }

ProfileSet default_profile_set() {
    auto [pro, am] = default_profiles();
    return ProfileSet{{pro, am}, 1.0 / 3.0};
}

ProfileSet read_profile_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProfile("cannot open profile " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidProfile(std::string("malformed profile JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidProfile("profile must be a JSON object");
    ProfileSet set;
    if (j.contains("professional") || j.contains("amateur")) {
        if (j.contains("professional")) set.profiles.push_back(profile_from(j["professional"], Cohort::professional));
        if (j.contains("amateur")) set.profiles.push_back(profile_from(j["amateur"], Cohort::amateur));
        set.professional_fraction = get_number(j, "professional_fraction", set.professional_fraction);
        if (!(set.professional_fraction >= 0.0 && set.professional_fraction <= 1.0)) {
            throw InvalidProfile("professional_fraction must lie in [0, 1]");
        }
    } else {
        set.profiles.push_back(profile_from(j, std::nullopt));
    }
    for (const auto& p : set.profiles) validate_profile(p, zones::default_zone_model().size());
    return set;
}

std::vector<std::filesystem::path> write_cohort(const ProfileSet& set, std::size_t count, std::uint64_t seed,
                                                const std::filesystem::path& out_dir, const Scenario& scenario) {
    if (set.profiles.empty()) throw InvalidProfile("no profiles");
    std::size_t n_first = count;
    if (set.profiles.size() > 1) {
        n_first = static_cast<std::size_t>(std::llround(static_cast<double>(count) * set.professional_fraction));
    }
    std::vector<std::filesystem::path> dirs;
    std::size_t per_cohort[2] = {0, 0};
    for (std::size_t k = 0; k < count; ++k) {
        const CohortProfile& profile = k < n_first ? set.profiles.front() : set.profiles.back();
        const auto c = static_cast<std::size_t>(profile.cohort);
        char id[32];
        std::snprintf(id, sizeof id, "%s%02zu", profile.cohort == Cohort::professional ? "pro" : "am",
                      ++per_cohort[c]);
        const PlayerMeta meta{id, profile.cohort, static_cast<int>(k + 1)};
        const Session s = generate_session(profile, meta, player_seed(seed, k + 1), scenario);
        const auto dir = out_dir / id;
        ingest::save_session_dir(s, dir);
        dirs.push_back(dir);
    }
    return dirs;
}

}  // namespace etk::synth
