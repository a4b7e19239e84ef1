#pragma once

#include "helioscore/series.hpp"

namespace helioscore {

/// Point-error summary of a test/reference pair.
struct ErrorSummary {
    double mae = 0.0;      // W/m²
    double mse = 0.0;      // (W/m²)²
    double rmse = 0.0;     // W/m²
    double q95_abs = 0.0;  // 95th percentile of |test - reference|, W/m²
    std::size_t n = 0;
};

/// MAE / MSE / RMSE and the 95% absolute-error quantile. The quantile uses
/// linear interpolation between order statistics at rank (n-1)*0.95.
/// Accumulation is sequential in index order so results are bit-stable.
/// Throws std::invalid_argument on an empty pair.
ErrorSummary error_summary(const AlignedPair& pair);

/// Forecast skill FS = 1 - err_forecast / err_reference for any one error
/// metric (MAE, MSE or RMSE; caller picks which values to pass). Throws
/// std::invalid_argument when the reference error is not positive.
double forecast_skill(double err_forecast, double err_reference);

}  // namespace helioscore
