#pragma once

// Domain types shared by every pipeline stage.
//
// Time is always seconds relative to the session origin. Screen coordinates
// are pixels with the origin at (0, 0) and the far corner at (width, height).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace etk {

enum class Cohort { professional, amateur };

const char* to_string(Cohort cohort);
std::optional<Cohort> cohort_from_string(std::string_view text);

struct PlayerMeta {
    std::string player_id;
    Cohort cohort = Cohort::amateur;
    int index = 1;  // 1-based player number within a dataset

    bool operator==(const PlayerMeta&) const = default;
};

struct ScreenDims {
    int width = 1920;
    int height = 1080;

    bool operator==(const ScreenDims&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

struct GazeSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;

    bool operator==(const GazeSample&) const = default;
};

struct GazeSeries {
    PlayerMeta player;
    std::vector<GazeSample> samples;
    double nominal_rate_hz = 60.0;
    ScreenDims screen;

    bool operator==(const GazeSeries&) const = default;
};

// Key alphabet of the input logger, in canonical serialization order.
enum class Key : std::uint8_t {
    W, A, S, D, MOUSE1, MOUSE2, SPACE, CTRL, SHIFT, R, E, Q, K1, K2, K3, K4, K5
};

inline constexpr std::size_t kKeyCount = 17;

inline constexpr std::array<Key, kKeyCount> kAllKeys = {
    Key::W,     Key::A,    Key::S,     Key::D, Key::MOUSE1, Key::MOUSE2,
    Key::SPACE, Key::CTRL, Key::SHIFT, Key::R, Key::E,      Key::Q,
    Key::K1,    Key::K2,   Key::K3,    Key::K4, Key::K5};

std::string_view key_name(Key key);
std::optional<Key> key_from_name(std::string_view name);

/// Set of keys held down at one sampling instant.
class KeySet {
public:
    constexpr KeySet() = default;
    constexpr KeySet(std::initializer_list<Key> keys) {
        for (Key k : keys) insert(k);
    }

    constexpr void insert(Key k) { bits_ |= bit(k); }
    constexpr void erase(Key k) { bits_ &= ~bit(k); }
    constexpr bool contains(Key k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool intersects(KeySet other) const { return (bits_ & other.bits_) != 0; }
    constexpr bool contains_all(KeySet other) const { return (bits_ & other.bits_) == other.bits_; }
    constexpr std::uint32_t bits() const { return bits_; }

    std::size_t size() const;

    constexpr bool operator==(const KeySet&) const = default;

private:
    static constexpr std::uint32_t bit(Key k) { return std::uint32_t{1} << static_cast<unsigned>(k); }
    std::uint32_t bits_ = 0;
};

struct InputSample {
    double t = 0.0;
    double mouse_x = 0.0;
    double mouse_y = 0.0;
    KeySet keys_down;

    bool operator==(const InputSample&) const = default;
};

/// Pulse can't exceed 240 bpm, so consecutive beats are more than this apart.
inline constexpr double kMinBeatInterval = 0.25;

struct BeatSeries {
    PlayerMeta player;
    std::vector<double> beat_times;

    bool operator==(const BeatSeries&) const = default;
};

struct Round {
    int index = 0;
    double start_t = 0.0;
    double end_t = 0.0;

    bool operator==(const Round&) const = default;
};

enum class EventKind { spawn, death, kill, weapon_fire };

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

struct GameEvent {
    double t = 0.0;
    EventKind kind = EventKind::spawn;
    std::string subject;
    std::optional<std::string> object;  // victim of a kill

    bool operator==(const GameEvent&) const = default;
};

struct MatchTimeline {
    std::vector<Round> rounds;
    std::vector<GameEvent> events;

    bool operator==(const MatchTimeline&) const = default;
};

/// Half-open time span [start_t, end_t).
struct Interval {
    double start_t = 0.0;
    double end_t = 0.0;

    double duration() const { return end_t - start_t; }
    bool contains(double t) const { return t >= start_t && t < end_t; }

    bool operator==(const Interval&) const = default;
};

double total_duration(std::span<const Interval> intervals);

inline constexpr double kDefaultInputPeriod = 0.01;

struct Session {
    PlayerMeta meta;
    GazeSeries gaze;
    std::vector<InputSample> input;
    std::optional<BeatSeries> hrm;
    MatchTimeline timeline;
    double input_period_s = kDefaultInputPeriod;

    bool operator==(const Session&) const = default;
};

struct Violation {
    std::string where;  // e.g. "gaze[12]", "events[3]"
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationOptions {
    // Samples may trail the last round end by at most this much.
    double clock_tolerance_s = 1.0;
};

/// Every invariant violation in the session; empty means valid.
std::vector<Violation> validate_session(const Session& session, const ValidationOptions& options = {});

}  // namespace etk
