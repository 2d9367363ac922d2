#pragma once

// Parsers and writers for the capture file formats:
//
//   gaze.csv      header `t,x,y`; empty x and y mark a dropout
//   input.csv     header `t,mouse_x,mouse_y,keys`; keys are `+`-joined
//   hrm.txt       one beat time per line
//   demo.events   `round_start <t> <index>`, `round_end <t> <index>`,
//                 `spawn|death|weapon_fire <t> <player>`, `kill <t> <killer> <victim>`
//   meta.json     player id, cohort, index, screen size and sampling rates
//
// Lines starting with `#` and blank lines are ignored everywhere.

#include "etk/errors.hpp"
#include "etk/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace etk::ingest {

class AssemblyError : public Error {
public:
    explicit AssemblyError(std::vector<Violation> violations);
    AssemblyError(const std::string& message, std::vector<Violation> violations = {});

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

GazeSeries parse_gaze_log(std::istream& in, ScreenDims screen = {}, double rate_hz = 60.0);
std::vector<InputSample> parse_input_log(std::istream& in);
BeatSeries parse_hrm_log(std::istream& in);
MatchTimeline parse_demo_events(std::istream& in);

void write_gaze_log(std::ostream& out, const GazeSeries& series);
void write_input_log(std::ostream& out, const std::vector<InputSample>& samples);
void write_hrm_log(std::ostream& out, const BeatSeries& beats);
void write_demo_events(std::ostream& out, const MatchTimeline& timeline);

/// Per-session metadata that the sensor files themselves don't carry.
struct SessionMeta {
    PlayerMeta player;
    ScreenDims screen;
    double gaze_rate_hz = 60.0;
    double input_period_s = kDefaultInputPeriod;
};

SessionMeta parse_session_meta(std::istream& in);
void write_session_meta(std::ostream& out, const SessionMeta& meta);

/// Binds parsed streams into a Session; throws AssemblyError on any violation.
Session assemble_session(const PlayerMeta& meta, GazeSeries gaze, std::vector<InputSample> input,
                         std::optional<BeatSeries> hrm, MatchTimeline timeline,
                         double input_period_s = kDefaultInputPeriod);

inline constexpr const char* kMetaFile = "meta.json";
inline constexpr const char* kGazeFile = "gaze.csv";
inline constexpr const char* kInputFile = "input.csv";
inline constexpr const char* kHrmFile = "hrm.txt";
inline constexpr const char* kDemoFile = "demo.events";

/// Reads a session directory. Missing required files raise AssemblyError;
/// hrm.txt is optional. ParseError messages are prefixed with the file path.
Session load_session_dir(const std::filesystem::path& dir);

/// Writes all files of a session into `dir` (created if needed).
void save_session_dir(const Session& session, const std::filesystem::path& dir);

}  // namespace etk::ingest
