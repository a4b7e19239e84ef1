#pragma once

#include <span>

#include "helioscore/series.hpp"

namespace helioscore {

/// One swinging-door segment: a run of samples following a common trend.
/// Slope is the chord slope between the pivot and closing samples, in
/// W/m²/min.
struct RampSegment {
    TimestampS t_start;
    TimestampS t_end;
    double slope;
    std::size_t start_index;
    std::size_t end_index;
};

/// Piecewise-constant slope over time: slopes[k] holds on
/// [breakpoints[k], breakpoints[k+1]). Segments tile the covered window.
struct SlopeFunction {
    std::vector<TimestampS> breakpoints;  // size = slopes.size() + 1
    std::vector<double> slopes;           // W/m²/min

    static SlopeFunction from_segments(const std::vector<RampSegment>& segments);
    double slope_at(TimestampS ts) const;
    TimestampS t_min() const { return breakpoints.front(); }
    TimestampS t_max() const { return breakpoints.back(); }
};

/// Door width for one UTC day: epsilon = tau * max of the day's clear-sky
/// GHI. Throws std::invalid_argument on an empty day.
double epsilon_for_day(const TimeSeries& clearsky_day, double tau);

/**
 * Swinging-door segmentation with the two-door envelope rule.
 *
 * A pivot opens a segment; walking right, the upper door slope
 * U = min_k (y_k + eps - y_p)/(t_k - t_p) and the lower door slope
 * L = max_k (y_k - eps - y_p)/(t_k - t_p) are tightened at each sample.
 * The segment closes at the last sample before the doors cross (L > U);
 * the closing sample becomes the next pivot, so consecutive segments share
 * an endpoint. The final segment closes at the last sample.
 *
 * Requires eps >= 0 and at least two samples.
 */
std::vector<RampSegment> swinging_door(const TimeSeries& series, double eps);

/// Mean absolute slope difference over [t_min, t_max], by exact piecewise
/// integration over the merged breakpoints. Both slope functions must
/// cover the window; result is in W/m²/min.
double ramp_score(const SlopeFunction& seg_test, const SlopeFunction& seg_ref,
                  TimestampS t_min, TimestampS t_max);

/**
 * Whole-evaluation ramp score: epsilon is recomputed per UTC day from the
 * day's clear-sky maximum, each day with at least two samples is scored
 * independently, and day scores are averaged weighted by day duration.
 * ghi_clr runs parallel to the pair's timestamps. Throws when no day is
 * scoreable.
 */
double multi_day_ramp_score(const AlignedPair& pair,
                            std::span<const double> ghi_clr, double tau);

}  // namespace helioscore
