#include "etk/ingest.hpp"

#include "etk/text.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace etk::ingest {

namespace {

using text::format_number;
using text::parse_number;
using text::split;
using text::trim;

std::string join_violations(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << "session failed validation (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << ")";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
        os << "; " << violations[i].where << ": " << violations[i].message;
    }
    if (violations.size() > 5) os << "; ...";
    return os.str();
}

// Line reader that skips comments and blank lines and remembers where each
// returned line started.
class LineReader {
public:
    LineReader(std::istream& in, FileKind kind) : in_(in), kind_(kind) {}

    bool next(std::string_view& line) {
        while (std::getline(in_, buf_)) {
            line_no_ += 1;
            line_offset_ = offset_;
            offset_ += buf_.size() + 1;
            std::string_view view(buf_);
            if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
            const auto trimmed = trim(view);
            if (trimmed.empty() || trimmed.front() == '#') continue;
            line = view;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(kind_, line_no_ == 0 ? 1 : line_no_, line_offset_, message);
    }

    ParseError error_at(std::size_t line, std::size_t offset, const std::string& message) const {
        return ParseError(kind_, line, offset, message);
    }

    std::size_t line_no() const { return line_no_; }
    std::size_t line_offset() const { return line_offset_; }

private:
    std::istream& in_;
    FileKind kind_;
    std::string buf_;
    std::size_t line_no_ = 0;
    std::size_t offset_ = 0;
    std::size_t line_offset_ = 0;
};

void expect_header(LineReader& reader, std::string_view expected) {
    std::string_view line;
    if (!reader.next(line)) reader.fail("missing header `" + std::string(expected) + "`");
    auto fields = split(line, ',');
    auto want = split(expected, ',');
    bool ok = fields.size() == want.size();
    for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = trim(fields[i]) == want[i];
    if (!ok) reader.fail("expected header `" + std::string(expected) + "`, got `" + std::string(line) + "`");
}

double require_number(LineReader& reader, std::string_view field, const char* what) {
    auto v = parse_number(trim(field));
    if (!v) reader.fail(std::string("malformed ") + what + " `" + std::string(field) + "`");
    return *v;
}

double require_time(LineReader& reader, std::string_view field, std::optional<double> previous) {
    const double t = require_number(reader, field, "timestamp");
    if (t < 0.0) reader.fail("negative timestamp");
    if (previous && !(t > *previous)) {
        reader.fail(t == *previous ? "duplicate timestamp" : "decreasing timestamp");
    }
    return t;
}

}  // namespace

AssemblyError::AssemblyError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

AssemblyError::AssemblyError(const std::string& message, std::vector<Violation> violations)
    : Error(message), violations_(std::move(violations)) {}

GazeSeries parse_gaze_log(std::istream& in, ScreenDims screen, double rate_hz) {
    GazeSeries series;
    series.nominal_rate_hz = rate_hz;
    series.screen = screen;

    LineReader reader(in, FileKind::gaze);
    expect_header(reader, "t,x,y");
    std::string_view line;
    std::optional<double> prev;
    while (reader.next(line)) {
        const auto fields = split(line, ',');
        if (fields.size() != 3) reader.fail("expected 3 columns, got " + std::to_string(fields.size()));
        GazeSample s;
        s.t = require_time(reader, fields[0], prev);
        prev = s.t;
        const auto xs = trim(fields[1]);
        const auto ys = trim(fields[2]);
        if (xs.empty() && ys.empty()) {
            s.valid = false;
        } else if (xs.empty() || ys.empty()) {
            reader.fail("x and y must both be present or both empty");
        } else {
            s.x = require_number(reader, xs, "x coordinate");
            s.y = require_number(reader, ys, "y coordinate");
            // Gaze off the monitor counts as a dropout.
            if (s.x < 0 || s.y < 0 || s.x > screen.width || s.y > screen.height) {
                s = GazeSample{s.t, 0.0, 0.0, false};
            }
        }
        series.samples.push_back(s);
    }
    return series;
}

std::vector<InputSample> parse_input_log(std::istream& in) {
    std::vector<InputSample> out;
    LineReader reader(in, FileKind::input);
    expect_header(reader, "t,mouse_x,mouse_y,keys");
    std::string_view line;
    std::optional<double> prev;
    while (reader.next(line)) {
        const auto fields = split(line, ',');
        if (fields.size() != 4) reader.fail("expected 4 columns, got " + std::to_string(fields.size()));
        InputSample s;
        s.t = require_time(reader, fields[0], prev);
        prev = s.t;
        s.mouse_x = require_number(reader, fields[1], "mouse_x");
        s.mouse_y = require_number(reader, fields[2], "mouse_y");
        const auto keys = trim(fields[3]);
        if (!keys.empty()) {
            for (auto token : split(keys, '+')) {
                token = trim(token);
                auto key = key_from_name(token);
                if (!key) reader.fail("unknown key `" + std::string(token) + "`");
                s.keys_down.insert(*key);
            }
        }
        out.push_back(s);
    }
    return out;
}

BeatSeries parse_hrm_log(std::istream& in) {
    BeatSeries beats;
    LineReader reader(in, FileKind::hrm);
    std::string_view line;
    std::optional<double> prev;
    while (reader.next(line)) {
        const double t = require_time(reader, line, prev);
        if (prev && !(t - *prev > kMinBeatInterval)) {
            reader.fail("inter-beat interval " + format_number(t - *prev) + " s implies a pulse of 240 bpm or more");
        }
        prev = t;
        beats.beat_times.push_back(t);
    }
    return beats;
}

MatchTimeline parse_demo_events(std::istream& in) {
    MatchTimeline tl;
    LineReader reader(in, FileKind::demo);

    struct Pending {
        std::size_t line;
        std::size_t offset;
    };
    std::optional<Round> open;
    std::vector<Pending> open_events;  // positions of events inside the open round
    std::set<std::string> spawned;
    std::vector<std::pair<std::string, Pending>> references;
    double last_event_t = -1.0;

    std::string_view line;
    while (reader.next(line)) {
        std::vector<std::string_view> tok;
        for (auto part : split(trim(line), ' ')) {
            if (!part.empty()) tok.push_back(part);
        }
        const auto kind = tok[0];
        auto need = [&](std::size_t n) {
            if (tok.size() != n) {
                reader.fail("`" + std::string(kind) + "` expects " + std::to_string(n - 1) + " fields");
            }
        };

        if (kind == "round_start" || kind == "round_end") {
            need(3);
            const double t = require_number(reader, tok[1], "time");
            const double idx = require_number(reader, tok[2], "round index");
            if (idx != static_cast<int>(idx)) reader.fail("round index must be an integer");
            const int index = static_cast<int>(idx);
            if (kind == "round_start") {
                if (open) reader.fail("round " + std::to_string(index) + " starts while round " +
                                      std::to_string(open->index) + " is still open");
                if (!tl.rounds.empty() && t < tl.rounds.back().end_t) reader.fail("round overlaps the previous round");
                if (!tl.rounds.empty() && index <= tl.rounds.back().index) reader.fail("round indices must increase");
                if (t < 0.0) reader.fail("negative timestamp");
                open = Round{index, t, t};
                open_events.clear();
            } else {
                if (!open) reader.fail("round_end without a matching round_start");
                if (index != open->index) reader.fail("round_end index does not match the open round");
                if (!(t > open->start_t)) reader.fail("round must end after it starts");
                open->end_t = t;
                // Events were checked against the start when read; the end is known only now.
                const std::size_t first = tl.events.size() - open_events.size();
                for (std::size_t i = 0; i < open_events.size(); ++i) {
                    if (tl.events[first + i].t > t) {
                        throw reader.error_at(open_events[i].line, open_events[i].offset,
                                              "event at t=" + format_number(tl.events[first + i].t) +
                                                  " lies outside every round (round ends at " + format_number(t) + ")");
                    }
                }
                tl.rounds.push_back(*open);
                open.reset();
            }
            continue;
        }

        auto ev_kind = event_kind_from_string(kind);
        if (!ev_kind) reader.fail("unknown event kind `" + std::string(kind) + "`");
        need(*ev_kind == EventKind::kill ? 4 : 3);
        GameEvent ev;
        ev.kind = *ev_kind;
        ev.t = require_number(reader, tok[1], "time");
        ev.subject = std::string(tok[2]);
        if (*ev_kind == EventKind::kill) ev.object = std::string(tok[3]);
        if (!open || ev.t < open->start_t) {
            reader.fail("event at t=" + format_number(ev.t) + " lies outside every round");
        }
        if (ev.t < last_event_t) reader.fail("events must be in chronological order");
        last_event_t = ev.t;

        const Pending here{reader.line_no(), reader.line_offset()};
        if (*ev_kind == EventKind::spawn) {
            spawned.insert(ev.subject);
        } else {
            references.emplace_back(ev.subject, here);
            if (ev.object) references.emplace_back(*ev.object, here);
        }
        open_events.push_back(here);
        tl.events.push_back(std::move(ev));
    }
    if (open) reader.fail("round " + std::to_string(open->index) + " is never closed");

    for (const auto& [player, where] : references) {
        if (!spawned.contains(player)) {
            throw reader.error_at(where.line, where.offset, "player `" + player + "` never spawns");
        }
    }
    return tl;
}

void write_gaze_log(std::ostream& out, const GazeSeries& series) {
    out << "t,x,y\n";
    for (const auto& s : series.samples) {
        out << format_number(s.t) << ',';
        if (s.valid) out << format_number(s.x) << ',' << format_number(s.y);
        else out << ',';
        out << '\n';
    }
}

void write_input_log(std::ostream& out, const std::vector<InputSample>& samples) {
    out << "t,mouse_x,mouse_y,keys\n";
    for (const auto& s : samples) {
        out << format_number(s.t) << ',' << format_number(s.mouse_x) << ',' << format_number(s.mouse_y) << ',';
        bool first = true;
        for (Key k : kAllKeys) {
            if (!s.keys_down.contains(k)) continue;
            if (!first) out << '+';
            out << key_name(k);
            first = false;
        }
        out << '\n';
    }
}

void write_hrm_log(std::ostream& out, const BeatSeries& beats) {
    for (double t : beats.beat_times) out << format_number(t) << '\n';
}

void write_demo_events(std::ostream& out, const MatchTimeline& timeline) {
    std::size_t e = 0;
    const auto& events = timeline.events;
    const auto& rounds = timeline.rounds;
    for (std::size_t r_i = 0; r_i < rounds.size(); ++r_i) {
        const Round& r = rounds[r_i];
        // An event exactly at a shared boundary goes to the later round.
        const bool shares_end = r_i + 1 < rounds.size() && rounds[r_i + 1].start_t == r.end_t;
        out << "round_start " << format_number(r.start_t) << ' ' << r.index << '\n';
        while (e < events.size() && (events[e].t < r.end_t || (events[e].t == r.end_t && !shares_end))) {
            const auto& ev = events[e++];
            out << to_string(ev.kind) << ' ' << format_number(ev.t) << ' ' << ev.subject;
            if (ev.object) out << ' ' << *ev.object;
            out << '\n';
        }
        out << "round_end " << format_number(r.end_t) << ' ' << r.index << '\n';
    }
}

SessionMeta parse_session_meta(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(FileKind::meta, 1, e.byte, e.what());
    }
    SessionMeta meta;
    try {
        meta.player.player_id = j.at("player_id").get<std::string>();
        const auto cohort = cohort_from_string(j.at("cohort").get<std::string>());
        if (!cohort) throw ParseError(FileKind::meta, 1, 0, "cohort must be `professional` or `amateur`");
        meta.player.cohort = *cohort;
        meta.player.index = j.at("index").get<int>();
        if (j.contains("screen")) {
            meta.screen.width = j["screen"].at("width").get<int>();
            meta.screen.height = j["screen"].at("height").get<int>();
        }
        meta.gaze_rate_hz = j.value("gaze_rate_hz", 60.0);
        meta.input_period_s = j.value("input_period_s", kDefaultInputPeriod);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(FileKind::meta, 1, 0, e.what());
    }
    if (meta.player.player_id.empty()) throw ParseError(FileKind::meta, 1, 0, "player_id is empty");
    if (meta.player.index < 1) throw ParseError(FileKind::meta, 1, 0, "index must be >= 1");
    if (!(meta.gaze_rate_hz > 0) || !(meta.input_period_s > 0)) {
        throw ParseError(FileKind::meta, 1, 0, "sampling rates must be positive");
    }
    if (meta.screen.width <= 0 || meta.screen.height <= 0) {
        throw ParseError(FileKind::meta, 1, 0, "screen dimensions must be positive");
    }
    return meta;
}

void write_session_meta(std::ostream& out, const SessionMeta& meta) {
    nlohmann::json j;
    j["player_id"] = meta.player.player_id;
    j["cohort"] = to_string(meta.player.cohort);
    j["index"] = meta.player.index;
    j["screen"] = {{"width", meta.screen.width}, {"height", meta.screen.height}};
    j["gaze_rate_hz"] = meta.gaze_rate_hz;
    j["input_period_s"] = meta.input_period_s;
    out << j.dump(2) << '\n';
}

Session assemble_session(const PlayerMeta& meta, GazeSeries gaze, std::vector<InputSample> input,
                         std::optional<BeatSeries> hrm, MatchTimeline timeline, double input_period_s) {
    Session s;
    s.meta = meta;
    s.gaze = std::move(gaze);
    s.gaze.player = meta;
    s.input = std::move(input);
    s.hrm = std::move(hrm);
    if (s.hrm) s.hrm->player = meta;
    s.timeline = std::move(timeline);
    s.input_period_s = input_period_s;
    auto violations = validate_session(s);
    if (!violations.empty()) throw AssemblyError(std::move(violations));
    return s;
}

namespace {

namespace fs = std::filesystem;

template <class Fn>
auto parse_file(const fs::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssemblyError("cannot open " + path.string());
    try {
        return fn(in);
    } catch (const ParseError& e) {
        throw e.with_source(path.string());
    }
}

}  // namespace

Session load_session_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw AssemblyError(dir.string() + " is not a directory");
    std::vector<Violation> missing;
    for (const char* name : {kMetaFile, kGazeFile, kInputFile, kDemoFile}) {
        if (!fs::is_regular_file(dir / name)) missing.push_back({name, "required file is missing"});
    }
    if (!missing.empty()) {
        const std::string message = dir.string() + ": missing " + std::to_string(missing.size()) +
                                    " required file(s), first `" + missing.front().where + "`";
        throw AssemblyError(message, std::move(missing));
    }

    const auto meta = parse_file(dir / kMetaFile, [](std::istream& in) { return parse_session_meta(in); });
    auto gaze = parse_file(dir / kGazeFile,
                           [&](std::istream& in) { return parse_gaze_log(in, meta.screen, meta.gaze_rate_hz); });
    auto input = parse_file(dir / kInputFile, [](std::istream& in) { return parse_input_log(in); });
    std::optional<BeatSeries> hrm;
    if (fs::is_regular_file(dir / kHrmFile)) {
        hrm = parse_file(dir / kHrmFile, [](std::istream& in) { return parse_hrm_log(in); });
    }
    auto timeline = parse_file(dir / kDemoFile, [](std::istream& in) { return parse_demo_events(in); });
    try {
        return assemble_session(meta.player, std::move(gaze), std::move(input), std::move(hrm), std::move(timeline),
                                meta.input_period_s);
    } catch (const AssemblyError& e) {
        throw AssemblyError(dir.string() + ": " + e.what(), e.violations());
    }
}

void save_session_dir(const Session& session, const fs::path& dir) {
    fs::create_directories(dir);
    auto write = [&](const char* name, auto&& fn) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        fn(out);
    };
    write(kMetaFile, [&](std::ostream& out) {
        write_session_meta(out, SessionMeta{session.meta, session.gaze.screen, session.gaze.nominal_rate_hz,
                                            session.input_period_s});
    });
    write(kGazeFile, [&](std::ostream& out) { write_gaze_log(out, session.gaze); });
    write(kInputFile, [&](std::ostream& out) { write_input_log(out, session.input); });
    if (session.hrm) write(kHrmFile, [&](std::ostream& out) { write_hrm_log(out, *session.hrm); });
    write(kDemoFile, [&](std::ostream& out) { write_demo_events(out, session.timeline); });
}

}  // namespace etk::ingest
