#pragma once

// Independent reference implementations the tests compare the library
// against. Everything here is deliberately brute-force or closed-form and
// written without reusing library internals.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Exhaustive DTW: enumerates every monotone path from (0,0) to (n-1,n-1)
/// with steps {(1,0),(0,1),(1,1)} and returns the minimal accumulated
/// |test[i] - ref[j]|. Exponential; keep n small (<= 7).
inline double dtw_cost_bruteforce(const std::vector<double>& test,
                                  const std::vector<double>& ref) {
    const std::size_t n = test.size();
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        std::size_t i, j;
        double cost;
    };
    std::vector<Frame> stack;
    stack.push_back({0, 0, std::abs(test[0] - ref[0])});
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.cost >= best) continue;
        if (f.i == n - 1 && f.j == n - 1) {
            best = f.cost;
            continue;
        }
        if (f.i + 1 < n && f.j + 1 < n) {
            stack.push_back(
                {f.i + 1, f.j + 1, f.cost + std::abs(test[f.i + 1] - ref[f.j + 1])});
        }
        if (f.i + 1 < n) {
            stack.push_back({f.i + 1, f.j, f.cost + std::abs(test[f.i + 1] - ref[f.j])});
        }
        if (f.j + 1 < n) {
            stack.push_back({f.i, f.j + 1, f.cost + std::abs(test[f.i] - ref[f.j + 1])});
        }
    }
    return best;
}

/// Ordinary least squares for y = X w + b via normal equations with a bias
/// column, solved by Gaussian elimination with partial pivoting. Returns
/// the stacked [w..., b] vector.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& x,
                                         const std::vector<double>& y) {
    const std::size_t m = x.size();
    const std::size_t n = x[0].size() + 1;  // + bias column
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<double> row(n);
        for (std::size_t f = 0; f + 1 < n; ++f) row[f] = x[r][f];
        row[n - 1] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i][j] += row[i] * row[j];
            a[i][n] += row[i] * y[r];
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-12) {
            throw std::runtime_error("least_squares: singular normal equations");
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    std::vector<double> solution(n);
    for (std::size_t i = 0; i < n; ++i) solution[i] = a[i][n] / a[i][i];
    return solution;
}

/// Central-difference gradient of an arbitrary scalar function of a
/// parameter vector.
template <typename LossFn>
std::vector<double> finite_difference(LossFn loss, std::vector<double> theta,
                                      double step = 1e-6) {
    std::vector<double> grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + step;
        const double up = loss(theta);
        theta[i] = saved - step;
        const double down = loss(theta);
        theta[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

}  // namespace oracles
