#include "etk/model.hpp"

#include "etk/errors.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace etk {

const char* to_string(FileKind kind) {
    switch (kind) {
        case FileKind::gaze: return "gaze";
        case FileKind::input: return "input";
        case FileKind::hrm: return "hrm";
        case FileKind::demo: return "demo";
        case FileKind::meta: return "meta";
        case FileKind::zones: return "zones";
        case FileKind::profile: return "profile";
    }
    return "unknown";
}

namespace {

std::string format_parse_error(FileKind kind, std::size_t line, std::size_t offset, const std::string& message,
                               const std::string& source) {
    std::ostringstream os;
    if (source.empty()) {
        os << to_string(kind);
    } else {
        os << source;
    }
    os << " line " << line << " (byte " << offset << "): " << message;
    return os.str();
}

constexpr std::array<std::string_view, kKeyCount> kKeyNames = {
    "W", "A", "S", "D", "MOUSE1", "MOUSE2", "SPACE", "CTRL", "SHIFT",
    "R", "E", "Q", "1", "2", "3", "4", "5"};

}  // namespace

ParseError::ParseError(FileKind kind, std::size_t line, std::size_t byte_offset, const std::string& message,
                       const std::string& source)
    : Error(format_parse_error(kind, line, byte_offset, message, source)),
      kind_(kind),
      line_(line),
      byte_offset_(byte_offset),
      detail_(message),
      source_(source) {}

const char* to_string(Cohort cohort) {
    return cohort == Cohort::professional ? "professional" : "amateur";
}

std::optional<Cohort> cohort_from_string(std::string_view text) {
    if (text == "professional") return Cohort::professional;
    if (text == "amateur") return Cohort::amateur;
    return std::nullopt;
}

std::string_view key_name(Key key) { return kKeyNames[static_cast<std::size_t>(key)]; }

std::optional<Key> key_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKeyCount; ++i) {
        if (kKeyNames[i] == name) return kAllKeys[i];
    }
    return std::nullopt;
}

std::size_t KeySet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::spawn: return "spawn";
        case EventKind::death: return "death";
        case EventKind::kill: return "kill";
        case EventKind::weapon_fire: return "weapon_fire";
    }
    return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
    if (text == "spawn") return EventKind::spawn;
    if (text == "death") return EventKind::death;
    if (text == "kill") return EventKind::kill;
    if (text == "weapon_fire") return EventKind::weapon_fire;
    return std::nullopt;
}

double total_duration(std::span<const Interval> intervals) {
    double total = 0.0;
    for (const auto& iv : intervals) total += iv.duration();
    return total;
}

namespace {

std::string indexed(const char* name, std::size_t i) {
    return std::string(name) + "[" + std::to_string(i) + "]";
}

void check_player(const PlayerMeta& p, const char* where, std::vector<Violation>& out) {
    if (p.player_id.empty()) out.push_back({where, "player_id is empty"});
    if (p.index < 1) out.push_back({where, "player index must be >= 1"});
}

void check_timeline(const MatchTimeline& tl, std::vector<Violation>& out) {
    for (std::size_t i = 0; i < tl.rounds.size(); ++i) {
        const Round& r = tl.rounds[i];
        if (!(r.end_t > r.start_t)) out.push_back({indexed("rounds", i), "round end must be after its start"});
        if (i > 0 && r.start_t < tl.rounds[i - 1].end_t) {
            out.push_back({indexed("rounds", i), "round overlaps or precedes the previous round"});
        }
    }
    for (std::size_t i = 0; i < tl.events.size(); ++i) {
        const GameEvent& e = tl.events[i];
        const bool inside = std::any_of(tl.rounds.begin(), tl.rounds.end(), [&](const Round& r) {
            return e.t >= r.start_t && e.t <= r.end_t;
        });
        if (!inside) out.push_back({indexed("events", i), "event at t=" + std::to_string(e.t) + " lies outside every round"});
        if (e.subject.empty()) out.push_back({indexed("events", i), "event has no subject"});
        if (e.kind == EventKind::kill && !e.object) out.push_back({indexed("events", i), "kill event has no victim"});
    }
}

}  // namespace

std::vector<Violation> validate_session(const Session& session, const ValidationOptions& options) {
    std::vector<Violation> out;

    check_player(session.meta, "meta", out);
    if (session.gaze.player != session.meta) out.push_back({"gaze", "gaze series belongs to a different player"});
    if (!(session.gaze.nominal_rate_hz > 0.0)) out.push_back({"gaze", "nominal_rate_hz must be positive"});
    if (session.gaze.screen.width <= 0 || session.gaze.screen.height <= 0) {
        out.push_back({"gaze", "screen dimensions must be positive"});
    }
    if (!(session.input_period_s > 0.0)) out.push_back({"input", "input period must be positive"});

    check_timeline(session.timeline, out);

    const double horizon = session.timeline.rounds.empty()
                               ? 0.0
                               : session.timeline.rounds.back().end_t + options.clock_tolerance_s;
    auto check_clock = [&](double t, const char* name, std::size_t i) {
        if (t < 0.0) out.push_back({indexed(name, i), "negative timestamp"});
        if (t > horizon) out.push_back({indexed(name, i), "timestamp beyond the last round end"});
    };

    const auto& screen = session.gaze.screen;
    const auto& gs = session.gaze.samples;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (i > 0 && !(gs[i].t > gs[i - 1].t)) out.push_back({indexed("gaze", i), "timestamp does not increase"});
        if (gs[i].valid && (gs[i].x < 0 || gs[i].y < 0 || gs[i].x > screen.width || gs[i].y > screen.height)) {
            out.push_back({indexed("gaze", i), "valid sample outside the screen"});
        }
        check_clock(gs[i].t, "gaze", i);
    }

    const auto& in = session.input;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i > 0 && !(in[i].t > in[i - 1].t)) out.push_back({indexed("input", i), "timestamp does not increase"});
        if (in[i].keys_down.bits() >> kKeyCount) out.push_back({indexed("input", i), "key outside the alphabet"});
        check_clock(in[i].t, "input", i);
    }

    if (session.hrm) {
        if (session.hrm->player != session.meta) out.push_back({"hrm", "beat series belongs to a different player"});
        const auto& b = session.hrm->beat_times;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (i > 0 && !(b[i] - b[i - 1] > kMinBeatInterval)) {
                out.push_back({indexed("hrm", i), "inter-beat interval must exceed 0.25 s"});
            }
            check_clock(b[i], "hrm", i);
        }
    }

    std::set<std::string> players;
    for (const auto& e : session.timeline.events) {
        players.insert(e.subject);
        if (e.object) players.insert(*e.object);
    }
    if (!session.meta.player_id.empty() && !players.contains(session.meta.player_id)) {
        out.push_back({"timeline", "player '" + session.meta.player_id + "' never appears in the timeline"});
    }
    return out;
}

}  // namespace etk
