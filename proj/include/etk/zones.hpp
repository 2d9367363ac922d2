#pragma once

// Gaze zones of interest: the zone model, nearest-center assignment, rolling
// window occupancy distributions and screen heatmaps.
//
// Zone indices are 0-based in code. Exported files number zones from 1.

#include "etk/errors.hpp"
#include "etk/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etk::zones {

class ZoneModel {
public:
    /// Throws std::invalid_argument unless K >= 1, centers are pairwise
    /// distinct and labels are unique.
    ZoneModel(std::vector<Point> centers, std::vector<std::string> labels);

    std::size_t size() const { return centers_.size(); }
    const std::vector<Point>& centers() const { return centers_; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const ZoneModel&) const = default;

private:
    std::vector<Point> centers_;
    std::vector<std::string> labels_;
};

/// The nine default zones: crosshair, radar, HUD panels and the areas of
/// sight around the crosshair, on a 1920x1080 screen.
ZoneModel default_zone_model();

/// Nearest center by Euclidean distance; ties go to the lowest index.
std::size_t assign_zone(Point p, const ZoneModel& model);

enum class FitMode { fixed, lloyd, farthest_first };

struct FitOptions {
    FitMode mode = FitMode::fixed;
    std::optional<ZoneModel> seeds;  // fixed: defaults to default_zone_model()
    std::uint64_t seed = 0;          // k-means++ initialisation when lloyd has no seeds
    std::size_t max_iterations = 100;
    double tolerance_px = 1e-6;
};

/// Fits k zones to gaze points. Non-fixed modes throw DegenerateInput when
/// there are fewer distinct points than k.
ZoneModel fit_zones(std::span<const Point> points, std::size_t k, const FitOptions& options = {});

/// Within-cluster sum of squared distances under nearest-center assignment.
double within_cluster_ss(std::span<const Point> points, const ZoneModel& model);

struct ZoneSequence {
    Interval span;  // time extent the windows tile, usually an alive segment
    std::vector<double> times;
    std::vector<std::size_t> zones;
};

/// Assigns every valid sample of a segment to a zone. Invalid samples are
/// skipped.
ZoneSequence assign_zones(const GazeSeries& segment, const ZoneModel& model, Interval span);

struct WindowDistribution {
    std::size_t window_index = 0;
    double window_start = 0.0;
    std::vector<double> probs;
};

struct AveragedDistribution {
    std::vector<double> probs;
};

inline constexpr double kDefaultWindow = 15.0;
inline constexpr double kDefaultHop = 1.0;

/// Zone occupancy of each [start, start + window_s) fully inside seq.span,
/// starting at span.start_t and advancing by hop_s. Windows without samples
/// are skipped.
std::vector<WindowDistribution> window_distributions(const ZoneSequence& seq, std::size_t k,
                                                     double window_s = kDefaultWindow,
                                                     double hop_s = kDefaultHop);

/// Mean of the window distributions. Throws EmptyInput, DimensionMismatch.
AveragedDistribution average_distribution(std::span<const WindowDistribution> windows);

std::vector<std::size_t> zone_counts(const ZoneSequence& seq, std::size_t k);

/// Share of samples per zone. Throws EmptyInput.
std::vector<double> zone_shares(const ZoneSequence& seq, std::size_t k);

struct Heatmap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int cell_px = 10;
    std::vector<std::uint64_t> counts;  // row-major
    std::uint64_t total = 0;

    std::uint64_t at(std::size_t row, std::size_t col) const { return counts[row * cols + col]; }
    /// Counts divided by the total; all zeros when empty.
    std::vector<double> normalized() const;
};

Heatmap heatmap_grid(std::span<const Point> points, ScreenDims screen, int cell_px = 10);

void write_heatmap_csv(std::ostream& out, const Heatmap& heatmap);
/// Plain PGM (P2), cells scaled so the busiest one is 255.
void write_heatmap_pgm(std::ostream& out, const Heatmap& heatmap);

/// CSV `k,label,x,y` with k starting at 1.
void write_zone_model(std::ostream& out, const ZoneModel& model);
ZoneModel read_zone_model(std::istream& in);

}  // namespace etk::zones
