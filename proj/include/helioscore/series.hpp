#pragma once

#include <span>
#include <string>
#include <vector>

#include "helioscore/timeutil.hpp"

namespace helioscore {

/**
 * Timestamped GHI series (W/m² unless stated otherwise).
 *
 * Timestamps are strictly increasing UTC epoch seconds; values are finite.
 * Both invariants are checked at construction. nominal_step is the cadence
 * the series is expected to follow where it is gap-free (default 120 s).
 */
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<TimestampS> timestamps, std::vector<double> values,
               DurationS nominal_step = 120);

    const std::vector<TimestampS>& timestamps() const { return timestamps_; }
    const std::vector<double>& values() const { return values_; }
    DurationS nominal_step() const { return nominal_step_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    /// Index of ts, or -1 when absent.
    std::ptrdiff_t index_of(TimestampS ts) const;

private:
    std::vector<TimestampS> timestamps_;
    std::vector<double> values_;
    DurationS nominal_step_ = 120;
};

/**
 * Forecast series: values are predictions valid at their own timestamp,
 * issued `horizon` seconds earlier. The horizon must be a non-negative
 * multiple of the nominal step (0 only for the degenerate identity case).
 */
struct ForecastSeries {
    TimeSeries inner;
    DurationS horizon = 0;
    std::string producer;

    ForecastSeries() = default;
    ForecastSeries(TimeSeries series, DurationS horizon_s, std::string producer_label);
};

/// Test/Reference value pair on a shared timestamp grid.
struct AlignedPair {
    std::vector<TimestampS> timestamps;
    std::vector<double> test;
    std::vector<double> reference;

    std::size_t size() const { return timestamps.size(); }
};

/// Intersects the two timestamp grids, preserving order and copying values
/// unchanged. Missing points are dropped, never interpolated. Throws
/// std::runtime_error when the grids do not overlap.
AlignedPair align(const ForecastSeries& test, const TimeSeries& reference);

/// Aligns two plain series on their common grid.
AlignedPair align(const TimeSeries& test, const TimeSeries& reference);

/// Min-max normalization to [0, 1]; a constant series maps to all zeros.
/// Throws std::invalid_argument on an empty input.
std::vector<double> minmax_normalize(std::span<const double> values);

/// Splits at gaps larger than max_gap. The segments concatenate back to the
/// input exactly; a single point yields one single-point segment.
std::vector<TimeSeries> split_contiguous(const TimeSeries& series, DurationS max_gap);

}  // namespace helioscore
