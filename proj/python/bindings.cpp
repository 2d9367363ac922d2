#include "etk/cli.hpp"
#include "etk/ingest.hpp"
#include "etk/input_features.hpp"
#include "etk/numerics.hpp"
#include "etk/preprocess.hpp"
#include "etk/synth.hpp"
#include "etk/zones.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace etk;

namespace {

zones::ZoneModel model_or_default(const std::optional<std::vector<std::pair<double, double>>>& centers) {
    if (!centers) return zones::default_zone_model();
    std::vector<Point> pts;
    std::vector<std::string> labels;
    for (auto [x, y] : *centers) {
        pts.push_back({x, y});
        labels.push_back("zone " + std::to_string(pts.size()));
    }
    return zones::ZoneModel(pts, labels);
}

std::vector<std::vector<double>> session_windows(const Session& s, double window_s, double hop_s) {
    const auto model = zones::default_zone_model();
    const auto alive = preprocess::extract_alive_segments(s.timeline, s.meta.player_id);
    const auto parts = preprocess::slice_by_intervals(s.gaze, alive);
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto filled = preprocess::interpolate_gaps(parts[i]).first;
        for (auto& w : zones::window_distributions(zones::assign_zones(filled, model, alive[i]), model.size(),
                                                   window_s, hop_s)) {
            out.push_back(std::move(w.probs));
        }
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(etk, m) {
    m.doc() = "Session telemetry toolkit: zones, gaze windows, PCA, KDE and input features";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ingest::AssemblyError>(m, "AssemblyError", base.ptr());
    py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
    py::register_exception<DegenerateData>(m, "DegenerateData", base.ptr());
    py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<InvalidProfile>(m, "InvalidProfile", base.ptr());
    py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
    py::register_exception<EmptySupport>(m, "EmptySupport", base.ptr());
    py::register_exception<UnknownPlayer>(m, "UnknownPlayer", base.ptr());

    py::class_<GazeSample>(m, "GazeSample")
        .def_readonly("t", &GazeSample::t)
        .def_readonly("x", &GazeSample::x)
        .def_readonly("y", &GazeSample::y)
        .def_readonly("valid", &GazeSample::valid);

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>())
        .def_readonly("start_t", &Interval::start_t)
        .def_readonly("end_t", &Interval::end_t)
        .def("__repr__", [](const Interval& iv) {
            return "Interval(" + std::to_string(iv.start_t) + ", " + std::to_string(iv.end_t) + ")";
        });

    py::class_<Session>(m, "Session")
        .def_property_readonly("player_id", [](const Session& s) { return s.meta.player_id; })
        .def_property_readonly("cohort", [](const Session& s) { return std::string(to_string(s.meta.cohort)); })
        .def_property_readonly("gaze", [](const Session& s) { return s.gaze.samples; })
        .def_property_readonly("input_count", [](const Session& s) { return s.input.size(); })
        .def_property_readonly("beat_times",
                               [](const Session& s) { return s.hrm ? s.hrm->beat_times : std::vector<double>{}; })
        .def_property_readonly("round_count", [](const Session& s) { return s.timeline.rounds.size(); })
        .def("alive_segments",
             [](const Session& s) { return preprocess::extract_alive_segments(s.timeline, s.meta.player_id); })
        .def("violations", [](const Session& s) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : validate_session(s)) out.emplace_back(v.where, v.message);
            return out;
        });

    py::class_<preprocess::MissingReport>(m, "MissingReport")
        .def_readonly("total_samples", &preprocess::MissingReport::total_samples)
        .def_readonly("missing_samples", &preprocess::MissingReport::missing_samples)
        .def_readonly("missing_fraction", &preprocess::MissingReport::missing_fraction)
        .def_readonly("gap_histogram", &preprocess::MissingReport::gap_histogram)
        .def_readonly("interpolated_samples", &preprocess::MissingReport::interpolated_samples);

    py::class_<numerics::PcaModel>(m, "PcaModel")
        .def_readonly("mean", &numerics::PcaModel::mean)
        .def_readonly("components", &numerics::PcaModel::components)
        .def_readonly("explained_variance", &numerics::PcaModel::explained_variance)
        .def_readonly("explained_ratio", &numerics::PcaModel::explained_ratio)
        .def("project", [](const numerics::PcaModel& pca, const std::vector<double>& v, std::size_t dims) {
            return numerics::project(pca, v, dims);
        }, py::arg("vector"), py::arg("dims") = 2);

    m.def("load_session", &ingest::load_session_dir, py::arg("path"), "Read and validate a session directory.");
    m.def("save_session", &ingest::save_session_dir, py::arg("session"), py::arg("path"));
    m.def("missing_stats", [](const Session& s) { return preprocess::missing_stats(s.gaze); });
    m.def("window_distributions", &session_windows, py::arg("session"), py::arg("window_s") = 15.0,
          py::arg("hop_s") = 1.0, "Zone occupancy per rolling window over the alive segments.");
    m.def("round_features", [](const Session& s) {
        std::vector<std::tuple<int, std::string, double>> out;
        for (const auto& r : input::round_features(s)) out.emplace_back(r.round, r.feature, r.value);
        return out;
    });

    m.def("default_zone_model", [] {
        const auto z = zones::default_zone_model();
        std::vector<std::tuple<std::string, double, double>> out;
        for (std::size_t k = 0; k < z.size(); ++k) out.emplace_back(z.labels()[k], z.centers()[k].x, z.centers()[k].y);
        return out;
    }, "The nine default zones as (label, x, y).");
    m.def("assign_zone", [](double x, double y, const std::optional<std::vector<std::pair<double, double>>>& centers) {
        return zones::assign_zone({x, y}, model_or_default(centers));
    }, py::arg("x"), py::arg("y"), py::arg("centers") = py::none(), "0-based index of the nearest zone center.");

    m.def("fit_pca", [](const std::vector<std::vector<double>>& rows) { return numerics::fit_pca(rows); });
    m.def("dominant_coordinate", [](const std::vector<double>& c, double ratio) {
        return numerics::dominant_coordinate(c, ratio);
    }, py::arg("component"), py::arg("dominance_ratio") = 2.0);
    m.def("silverman_bandwidth", [](const std::vector<double>& s) { return numerics::silverman_bandwidth(s); });
    m.def("kde_evaluate", [](const std::vector<double>& s, double h, double x) {
        return numerics::kde_evaluate({s, h}, x);
    }, py::arg("samples"), py::arg("bandwidth"), py::arg("x"));
    m.def("kde_curve", [](const std::vector<double>& s, std::optional<double> h, std::size_t points) {
        const numerics::KdeModel model{s, h ? *h : numerics::silverman_bandwidth(s)};
        std::vector<std::pair<double, double>> out;
        for (const auto& p : numerics::kde_curve(model, points)) out.emplace_back(p.x, p.density);
        return out;
    }, py::arg("samples"), py::arg("bandwidth") = py::none(), py::arg("points") = 256);
    m.def("beats_to_bpm", [](const std::vector<double>& beats, std::size_t window) {
        BeatSeries b;
        b.beat_times = beats;
        std::vector<std::pair<double, double>> out;
        for (const auto& s : preprocess::beats_to_bpm(b, window)) out.emplace_back(s.t, s.bpm);
        return out;
    }, py::arg("beat_times"), py::arg("window_beats") = 4);

    m.def("generate_session", [](const std::string& cohort, std::uint64_t seed, int rounds) {
        const auto c = cohort_from_string(cohort);
        if (!c) throw InvalidProfile("cohort must be `professional` or `amateur`");
        const auto [pro, am] = synth::default_profiles();
        synth::Scenario sc;
        sc.rounds = rounds;
        const PlayerMeta meta{*c == Cohort::professional ? "pro01" : "am01", *c, 1};
        return synth::generate_session(*c == Cohort::professional ? pro : am, meta, seed, sc);
    }, py::arg("cohort"), py::arg("seed") = 0, py::arg("rounds") = 12, "One synthetic session from a default profile.");

    m.def("synth", [](const std::filesystem::path& out, std::size_t count, std::uint64_t seed, const std::string& profile) {
        return cli::cmd_synth(profile, count, seed, out);
    }, py::arg("out"), py::arg("count") = 15, py::arg("seed") = 0,
          py::arg("profile") = "default", "Write synthetic sessions; returns the exit status.");
    m.def("ingest", [](const std::vector<std::filesystem::path>& paths) {
        std::ostringstream out;
        const int status = cli::cmd_ingest(paths, out);
        return std::make_pair(status, out.str());
    }, py::arg("paths"), "Validate sessions; returns (exit status, JSON summary).");
    m.def("analyze", [](const std::vector<std::filesystem::path>& sessions, const std::filesystem::path& out,
                        double window_s, double hop_s, std::optional<double> bandwidth, std::uint64_t seed,
                        unsigned jobs) {
        cli::RunConfig cfg;
        cfg.sessions = sessions;
        cfg.out = out;
        cfg.window_s = window_s;
        cfg.hop_s = hop_s;
        cfg.bandwidth = bandwidth;
        cfg.seed = seed;
        cfg.jobs = jobs;
        py::gil_scoped_release release;
        return cli::cmd_analyze(cfg);
    }, py::arg("sessions"), py::arg("out"), py::arg("window_s") = 15.0, py::arg("hop_s") = 1.0,
       py::arg("bandwidth") = py::none(), py::arg("seed") = 0, py::arg("jobs") = 1,
       "Full analysis run; returns the exit status.");
}
