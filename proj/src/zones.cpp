#include "etk/zones.hpp"

#include "etk/random.hpp"
#include "etk/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

namespace etk::zones {

namespace {

double dist2(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::size_t nearest(Point p, std::span<const Point> centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = dist2(p, centers[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::size_t distinct_count(std::span<const Point> points) {
    std::vector<std::pair<double, double>> v;
    v.reserve(points.size());
    for (auto p : points) v.emplace_back(p.x, p.y);
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

std::vector<std::string> generic_labels(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("Zone " + std::to_string(i + 1));
    return labels;
}

std::vector<Point> kmeanspp(std::span<const Point> points, std::size_t k, std::uint64_t seed) {
    Xorshift64Star rng(seed);
    std::vector<Point> centers{points[rng.below(points.size())]};
    std::vector<double> d2(points.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = dist2(points[i], centers[nearest(points[i], centers)]);
            total += d2[i];
        }
        double target = rng.uniform() * total;
        std::size_t pick = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (d2[i] <= 0.0) continue;
            pick = i;
            target -= d2[i];
            if (target < 0.0) break;
        }
        centers.push_back(points[pick]);
    }
    return centers;
}

std::vector<Point> lloyd(std::span<const Point> points, std::vector<Point> centers, const FitOptions& opt) {
    const std::size_t k = centers.size();
    for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
        std::vector<double> sx(k, 0.0), sy(k, 0.0);
        std::vector<std::size_t> n(k, 0);
        for (auto p : points) {
            const auto c = nearest(p, centers);
            sx[c] += p.x;
            sy[c] += p.y;
            n[c] += 1;
        }
        double moved = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (n[c] == 0) continue;  // empty cluster keeps its center
            const Point next{sx[c] / static_cast<double>(n[c]), sy[c] / static_cast<double>(n[c])};
            moved = std::max(moved, std::sqrt(dist2(next, centers[c])));
            centers[c] = next;
        }
        if (moved < opt.tolerance_px) break;
    }
    return centers;
}

std::vector<Point> farthest_first(std::span<const Point> points, std::size_t k) {
    Point centroid;
    for (auto p : points) {
        centroid.x += p.x;
        centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(points.size());
    centroid.y /= static_cast<double>(points.size());

    std::size_t first = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (dist2(points[i], centroid) < dist2(points[first], centroid)) first = i;
    }
    std::vector<Point> centers{points[first]};
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = dist2(points[i], points[first]);
    while (centers.size() < k) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (d2[i] > d2[far]) far = i;
        }
        centers.push_back(points[far]);
        for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], dist2(points[i], points[far]));
    }
    return centers;
}

}  // namespace

ZoneModel::ZoneModel(std::vector<Point> centers, std::vector<std::string> labels)
    : centers_(std::move(centers)), labels_(std::move(labels)) {
    if (centers_.empty()) throw std::invalid_argument("zone model needs at least one center");
    if (labels_.size() != centers_.size()) throw std::invalid_argument("one label per center required");
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        if (!std::isfinite(centers_[i].x) || !std::isfinite(centers_[i].y)) {
            throw std::invalid_argument("zone centers must be finite");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (centers_[i] == centers_[j]) throw std::invalid_argument("zone centers must be distinct");
            if (labels_[i] == labels_[j]) throw std::invalid_argument("zone labels must be unique");
        }
    }
}

ZoneModel default_zone_model() {
    return ZoneModel(
        {{960, 540}, {345, 815}, {310, 180}, {1205, 530}, {1610, 180}, {715, 530}, {1575, 815}, {960, 260}, {960, 900}},
        {"Aiming Cross-hair", "Radar Area", "Armor & Health Bar", "Right Area of Sight", "Weapon & Ammo Panel",
         "Left Area of Sight", "Kill & Death Log", "Bottom Area of Sight", "Timer & Players Panel"});
}

std::size_t assign_zone(Point p, const ZoneModel& model) { return nearest(p, model.centers()); }

ZoneModel fit_zones(std::span<const Point> points, std::size_t k, const FitOptions& options) {
    if (options.mode == FitMode::fixed) {
        ZoneModel model = options.seeds ? *options.seeds : default_zone_model();
        if (model.size() != k) throw DimensionMismatch("seed model has a different number of zones");
        return model;
    }
    if (points.empty()) throw EmptyInput("no points to cluster");
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (distinct_count(points) < k) {
        throw DegenerateInput("only " + std::to_string(distinct_count(points)) + " distinct points for k=" +
                              std::to_string(k));
    }

    std::vector<std::string> labels = generic_labels(k);
    std::vector<Point> centers;
    if (options.mode == FitMode::lloyd) {
        if (options.seeds) {
            if (options.seeds->size() != k) throw DimensionMismatch("seed model has a different number of zones");
            centers = options.seeds->centers();
            labels = options.seeds->labels();
        } else {
            centers = kmeanspp(points, k, options.seed);
        }
        centers = lloyd(points, std::move(centers), options);
    } else {
        centers = farthest_first(points, k);
    }
    return ZoneModel(std::move(centers), std::move(labels));
}

double within_cluster_ss(std::span<const Point> points, const ZoneModel& model) {
    double total = 0.0;
    for (auto p : points) total += dist2(p, model.centers()[assign_zone(p, model)]);
    return total;
}

ZoneSequence assign_zones(const GazeSeries& segment, const ZoneModel& model, Interval span) {
    ZoneSequence seq;
    seq.span = span;
    for (const auto& s : segment.samples) {
        if (!s.valid) continue;
        seq.times.push_back(s.t);
        seq.zones.push_back(assign_zone({s.x, s.y}, model));
    }
    return seq;
}

std::vector<WindowDistribution> window_distributions(const ZoneSequence& seq, std::size_t k, double window_s,
                                                     double hop_s) {
    if (!(window_s > 0.0) || !(hop_s > 0.0)) throw std::invalid_argument("window and hop must be positive");
    constexpr double kEdge = 1e-9;
    std::vector<WindowDistribution> out;
    std::vector<std::size_t> counts(k);
    for (std::size_t step = 0;; ++step) {
        const double start = seq.span.start_t + static_cast<double>(step) * hop_s;
        const double end = start + window_s;
        if (end > seq.span.end_t + kEdge) break;
        auto first = std::lower_bound(seq.times.begin(), seq.times.end(), start);
        auto last = std::lower_bound(first, seq.times.end(), end);
        const auto n = static_cast<std::size_t>(last - first);
        if (n == 0) continue;
        std::fill(counts.begin(), counts.end(), 0);
        const auto offset = static_cast<std::size_t>(first - seq.times.begin());
        for (std::size_t i = offset; i < offset + n; ++i) {
            if (seq.zones[i] >= k) throw std::out_of_range("zone index outside [0, K)");
            counts[seq.zones[i]] += 1;
        }
        WindowDistribution w;
        w.window_index = out.size();
        w.window_start = start;
        w.probs.resize(k);
        for (std::size_t z = 0; z < k; ++z) w.probs[z] = static_cast<double>(counts[z]) / static_cast<double>(n);
        out.push_back(std::move(w));
    }
    return out;
}

AveragedDistribution average_distribution(std::span<const WindowDistribution> windows) {
    if (windows.empty()) throw EmptyInput("no windows to average");
    const std::size_t k = windows.front().probs.size();
    AveragedDistribution avg{std::vector<double>(k, 0.0)};
    for (const auto& w : windows) {
        if (w.probs.size() != k) throw DimensionMismatch("windows have different zone counts");
        for (std::size_t z = 0; z < k; ++z) avg.probs[z] += w.probs[z];
    }
    for (auto& p : avg.probs) p /= static_cast<double>(windows.size());
    return avg;
}

std::vector<std::size_t> zone_counts(const ZoneSequence& seq, std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (auto z : seq.zones) {
        if (z >= k) throw std::out_of_range("zone index outside [0, K)");
        counts[z] += 1;
    }
    return counts;
}

std::vector<double> zone_shares(const ZoneSequence& seq, std::size_t k) {
    if (seq.zones.empty()) throw EmptyInput("zone sequence is empty");
    const auto counts = zone_counts(seq, k);
    std::vector<double> shares(k);
    for (std::size_t z = 0; z < k; ++z) {
        shares[z] = static_cast<double>(counts[z]) / static_cast<double>(seq.zones.size());
    }
    return shares;
}

std::vector<double> Heatmap::normalized() const {
    std::vector<double> out(counts.size(), 0.0);
    if (total == 0) return out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return out;
}

Heatmap heatmap_grid(std::span<const Point> points, ScreenDims screen, int cell_px) {
    if (cell_px < 1) throw std::invalid_argument("cell_px must be >= 1");
    Heatmap h;
    h.cell_px = cell_px;
    h.cols = static_cast<std::size_t>((screen.width + cell_px - 1) / cell_px);
    h.rows = static_cast<std::size_t>((screen.height + cell_px - 1) / cell_px);
    h.counts.assign(h.rows * h.cols, 0);
    auto cell = [&](double v, std::size_t n) {
        if (!(v > 0.0)) return std::size_t{0};
        return std::min(static_cast<std::size_t>(v / cell_px), n - 1);
    };
    for (auto p : points) {
        h.counts[cell(p.y, h.rows) * h.cols + cell(p.x, h.cols)] += 1;
        h.total += 1;
    }
    return h;
}

void write_heatmap_csv(std::ostream& out, const Heatmap& heatmap) {
    for (std::size_t r = 0; r < heatmap.rows; ++r) {
        for (std::size_t c = 0; c < heatmap.cols; ++c) {
            if (c) out << ',';
            out << heatmap.at(r, c);
        }
        out << '\n';
    }
}

void write_heatmap_pgm(std::ostream& out, const Heatmap& heatmap) {
    const auto peak = heatmap.counts.empty() ? 0 : *std::max_element(heatmap.counts.begin(), heatmap.counts.end());
    out << "P2\n" << heatmap.cols << ' ' << heatmap.rows << "\n255\n";
    for (std::size_t r = 0; r < heatmap.rows; ++r) {
        for (std::size_t c = 0; c < heatmap.cols; ++c) {
            if (c) out << ' ';
            const auto v = heatmap.at(r, c);
            out << (peak == 0 ? 0 : (v * 255 + peak / 2) / peak);
        }
        out << '\n';
    }
}

void write_zone_model(std::ostream& out, const ZoneModel& model) {
    out << "k,label,x,y\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        out << i + 1 << ',' << model.labels()[i] << ',' << text::format_number(model.centers()[i].x) << ','
            << text::format_number(model.centers()[i].y) << '\n';
    }
}

ZoneModel read_zone_model(std::istream& in) {
    std::vector<Point> centers;
    std::vector<std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t offset = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t here = offset;
        offset += line.size() + 1;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto fail = [&](const std::string& msg) { throw ParseError(FileKind::zones, line_no, here, msg); };
        const auto fields = text::split(view, ',');
        if (!header) {
            if (fields.size() != 4 || text::trim(fields[0]) != "k" || text::trim(fields[1]) != "label" ||
                text::trim(fields[2]) != "x" || text::trim(fields[3]) != "y") {
                fail("expected header `k,label,x,y`");
            }
            header = true;
            continue;
        }
        if (fields.size() != 4) fail("expected 4 columns");
        const auto k = text::parse_number(text::trim(fields[0]));
        if (!k || *k != static_cast<double>(centers.size() + 1)) fail("zones must be numbered 1, 2, 3, ...");
        const auto x = text::parse_number(text::trim(fields[2]));
        const auto y = text::parse_number(text::trim(fields[3]));
        if (!x || !y) fail("malformed center coordinate");
        centers.push_back({*x, *y});
        labels.emplace_back(text::trim(fields[1]));
    }
    if (!header) throw ParseError(FileKind::zones, 1, 0, "missing header `k,label,x,y`");
    try {
        return ZoneModel(std::move(centers), std::move(labels));
    } catch (const std::invalid_argument& e) {
        throw ParseError(FileKind::zones, line_no == 0 ? 1 : line_no, offset, e.what());
    }
}

}  // namespace etk::zones
