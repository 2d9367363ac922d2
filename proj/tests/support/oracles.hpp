#pragma once

// Reference computations used only by tests. They take a deliberately
// different route from the library code they check.

#include <algorithm>
#include <cmath>
#include <vector>

namespace etk::test {

using DenseMatrix = std::vector<std::vector<double>>;

struct OracleEigen {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // unit, paired with values
};

/// Classical Jacobi: always annihilates the largest off-diagonal entry,
/// using the atan2 form of the rotation angle, until every off-diagonal
/// entry is below `tolerance` times the largest diagonal magnitude.
inline OracleEigen max_pivot_jacobi(DenseMatrix a, double tolerance = 1e-14) {
    const std::size_t n = a.size();
    DenseMatrix v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    for (int iter = 0; iter < 100000; ++iter) {
        std::size_t p = 0, q = 1;
        double big = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag = std::max(diag, std::abs(a[i][i]));
            for (std::size_t j = i + 1; j < n; ++j) {
                if (std::abs(a[i][j]) > big) {
                    big = std::abs(a[i][j]);
                    p = i;
                    q = j;
                }
            }
        }
        if (n < 2 || big <= tolerance * std::max(diag, 1e-300)) break;
        const double phi = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        const double c = std::cos(phi), s = std::sin(phi);
        for (std::size_t k = 0; k < n; ++k) {
            const double akp = a[k][p], akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double apk = a[p][k], aqk = a[q][k];
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k][p], vkq = v[k][q];
            v[k][p] = c * vkp - s * vkq;
            v[k][q] = s * vkp + c * vkq;
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
    OracleEigen out;
    for (auto i : order) {
        out.values.push_back(a[i][i]);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
        out.vectors.push_back(col);
    }
    return out;
}

/// Population covariance computed with explicit two-pass sums.
inline DenseMatrix population_covariance(const std::vector<std::vector<double>>& rows) {
    const std::size_t k = rows.front().size();
    std::vector<double> mean(k, 0.0);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < k; ++i) mean[i] += r[i] / static_cast<double>(rows.size());
    }
    DenseMatrix c(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (const auto& r : rows) s += (r[i] - mean[i]) * (r[j] - mean[j]);
            c[i][j] = s / static_cast<double>(rows.size());
        }
    }
    return c;
}

/// Trapezoidal rule on [a, b] with step h.
template <class Fn>
double trapezoid(Fn&& f, double a, double b, double h) {
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / h));
    const double step = (b - a) / static_cast<double>(n);
    double sum = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) sum += f(a + step * static_cast<double>(i));
    return sum * step;
}

}  // namespace etk::test
