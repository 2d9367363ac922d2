#pragma once

#include "etk/errors.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace etk::numerics {

/// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    double trace() const;
    /// Frobenius norm of the off-diagonal part.
    double off_diagonal_norm() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
    std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal norm
/// is at most `tolerance` times the Frobenius norm of the input.
EigenDecomposition jacobi_eigen(Matrix a, double tolerance = 1e-12, std::size_t max_sweeps = 100);

struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // unit rows, descending variance
    std::vector<double> explained_variance;
    std::vector<double> explained_ratio;
};

/// Population covariance (divide by n).
Matrix covariance(std::span<const std::vector<double>> vectors, std::span<const double> mean);

/// PCA of the rows. Each component is flipped so its largest-magnitude
/// coordinate is positive. Throws InsufficientData for fewer than 2 rows,
/// DimensionMismatch for ragged input and DegenerateData for zero covariance.
PcaModel fit_pca(std::span<const std::vector<double>> vectors);

std::vector<double> project(const PcaModel& model, std::span<const double> vector, std::size_t dims = 2);

/// Index and loading of the largest-magnitude coordinate when it is at least
/// `dominance_ratio` times the runner-up.
std::optional<std::pair<std::size_t, double>> dominant_coordinate(std::span<const double> component,
                                                                  double dominance_ratio = 2.0);

/// Linear-interpolation quantile (the usual "type 7" definition).
double quantile(std::vector<double> samples, double q);

/// Silverman's rule: 0.9 min(std, IQR / 1.34) n^(-1/5), std with n - 1.
double silverman_bandwidth(std::span<const double> samples);

struct KdeModel {
    std::vector<double> samples;
    double bandwidth = 1.0;
};

double kde_evaluate(const KdeModel& model, double x);

struct CurvePoint {
    double x = 0.0;
    double density = 0.0;
};

/// Density on a uniform grid from min - 3h to max + 3h.
std::vector<CurvePoint> kde_curve(const KdeModel& model, std::size_t points = 256);

}  // namespace etk::numerics
