#include "etk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace etk::numerics {

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::off_diagonal_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (i != j) s += (*this)(i, j) * (*this)(i, j);
        }
    }
    return std::sqrt(s);
}

EigenDecomposition jacobi_eigen(Matrix a, double tolerance, std::size_t max_sweeps) {
    const std::size_t n = a.size();
    Matrix v(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
    }
    const double threshold = tolerance * std::sqrt(frob);

    std::size_t sweeps = 0;
    while (sweeps < max_sweeps && a.off_diagonal_norm() > threshold) {
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle zeroing a(p, q).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    for (auto i : order) {
        out.values.push_back(a(i, i));
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v(k, i);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

Matrix covariance(std::span<const std::vector<double>> vectors, std::span<const double> mean) {
    const std::size_t k = mean.size();
    Matrix c(k);
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < k; ++i) {
            const double di = v[i] - mean[i];
            for (std::size_t j = i; j < k; ++j) c(i, j) += di * (v[j] - mean[j]);
        }
    }
    const double n = static_cast<double>(vectors.size());
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            c(i, j) /= n;
            c(j, i) = c(i, j);
        }
    }
    return c;
}

PcaModel fit_pca(std::span<const std::vector<double>> vectors) {
    if (vectors.size() < 2) throw InsufficientData("PCA needs at least two vectors");
    const std::size_t k = vectors.front().size();
    if (k == 0) throw DimensionMismatch("vectors are empty");
    for (const auto& v : vectors) {
        if (v.size() != k) throw DimensionMismatch("vectors differ in dimension");
    }
    const bool identical = std::all_of(vectors.begin(), vectors.end(), [&](const auto& v) { return v == vectors.front(); });
    if (identical) throw DegenerateData("all vectors are identical");

    PcaModel model;
    model.mean.assign(k, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < k; ++i) model.mean[i] += v[i];
    }
    for (auto& m : model.mean) m /= static_cast<double>(vectors.size());

    const Matrix cov = covariance(vectors, model.mean);
    const double trace = cov.trace();
    if (!(trace > 0.0)) throw DegenerateData("covariance has zero trace");

    auto eig = jacobi_eigen(cov);
    for (std::size_t i = 0; i < k; ++i) {
        auto& comp = eig.vectors[i];
        std::size_t big = 0;
        for (std::size_t j = 1; j < k; ++j) {
            if (std::abs(comp[j]) > std::abs(comp[big])) big = j;
        }
        if (comp[big] < 0) {
            for (auto& c : comp) c = -c;
        }
        const double var = std::max(eig.values[i], 0.0);
        model.components.push_back(std::move(comp));
        model.explained_variance.push_back(var);
        model.explained_ratio.push_back(var / trace);
    }
    return model;
}

std::vector<double> project(const PcaModel& model, std::span<const double> vector, std::size_t dims) {
    if (vector.size() != model.mean.size()) {
        throw DimensionMismatch("vector has " + std::to_string(vector.size()) + " coordinates, model expects " +
                                std::to_string(model.mean.size()));
    }
    if (dims > model.components.size()) throw DimensionMismatch("more dimensions requested than components");
    std::vector<double> out(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t i = 0; i < vector.size(); ++i) {
            out[d] += (vector[i] - model.mean[i]) * model.components[d][i];
        }
    }
    return out;
}

std::optional<std::pair<std::size_t, double>> dominant_coordinate(std::span<const double> component,
                                                                  double dominance_ratio) {
    if (component.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < component.size(); ++i) {
        if (std::abs(component[i]) > std::abs(component[best])) best = i;
    }
    if (component[best] == 0.0) return std::nullopt;
    double runner_up = 0.0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        if (i != best) runner_up = std::max(runner_up, std::abs(component[i]));
    }
    if (std::abs(component[best]) >= dominance_ratio * runner_up) return std::make_pair(best, component[best]);
    return std::nullopt;
}

double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw EmptyInput("quantile of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= samples.size()) return samples.back();
    return samples[lo] + (h - static_cast<double>(lo)) * (samples[lo + 1] - samples[lo]);
}

double silverman_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InsufficientData("bandwidth needs at least two samples");
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DegenerateData("samples have zero spread");

    std::vector<double> v(samples.begin(), samples.end());
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    // A zero IQR with non-zero std (heavy ties) falls back to the std alone.
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double kde_evaluate(const KdeModel& model, double x) {
    const double h = model.bandwidth;
    double sum = 0.0;
    for (double s : model.samples) {
        const double u = (x - s) / h;
        sum += std::exp(-0.5 * u * u);
    }
    return sum * std::numbers::inv_sqrtpi / std::numbers::sqrt2 / (static_cast<double>(model.samples.size()) * h);
}

std::vector<CurvePoint> kde_curve(const KdeModel& model, std::size_t points) {
    if (model.samples.empty()) throw EmptyInput("KDE has no samples");
    if (points < 2) throw std::invalid_argument("curve needs at least two points");
    const auto [lo_it, hi_it] = std::minmax_element(model.samples.begin(), model.samples.end());
    const double lo = *lo_it - 3.0 * model.bandwidth;
    const double hi = *hi_it + 3.0 * model.bandwidth;
    std::vector<CurvePoint> out;
    out.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back({x, kde_evaluate(model, x)});
    }
    return out;
}

}  // namespace etk::numerics
