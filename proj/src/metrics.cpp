#include "helioscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helioscore {

ErrorSummary error_summary(const AlignedPair& pair) {
    const std::size_t n = pair.size();
    if (n == 0) {
        throw std::invalid_argument("error_summary: empty pair");
    }
    ErrorSummary s;
    s.n = n;
    std::vector<double> abs_err(n);
    double sum_abs = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pair.test[i] - pair.reference[i];
        abs_err[i] = std::abs(e);
        sum_abs += abs_err[i];
        sum_sq += e * e;
    }
    s.mae = sum_abs / static_cast<double>(n);
    s.mse = sum_sq / static_cast<double>(n);
    s.rmse = std::sqrt(s.mse);

    std::sort(abs_err.begin(), abs_err.end());
    const double rank = 0.95 * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    s.q95_abs = (lo + 1 < n)
        ? abs_err[lo] + frac * (abs_err[lo + 1] - abs_err[lo])
        : abs_err[lo];
    return s;
}

double forecast_skill(double err_forecast, double err_reference) {
    if (!(err_reference > 0.0)) {
        throw std::invalid_argument("forecast_skill: degenerate reference error");
    }
    return 1.0 - err_forecast / err_reference;
}

}  // namespace helioscore
