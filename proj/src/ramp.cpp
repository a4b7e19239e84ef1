#include "helioscore/ramp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace helioscore {

namespace {

RampSegment make_segment(const TimeSeries& series, std::size_t pivot, std::size_t close) {
    const auto& t = series.timestamps();
    const auto& y = series.values();
    const double minutes = static_cast<double>(t[close] - t[pivot]) / 60.0;
    return RampSegment{t[pivot], t[close], (y[close] - y[pivot]) / minutes, pivot, close};
}

}  // namespace

SlopeFunction SlopeFunction::from_segments(const std::vector<RampSegment>& segments) {
    if (segments.empty()) {
        throw std::invalid_argument("SlopeFunction: no segments");
    }
    SlopeFunction f;
    f.breakpoints.reserve(segments.size() + 1);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i > 0 && segments[i].t_start != segments[i - 1].t_end) {
            throw std::invalid_argument("SlopeFunction: segments must tile without gaps");
        }
        f.breakpoints.push_back(segments[i].t_start);
        f.slopes.push_back(segments[i].slope);
    }
    f.breakpoints.push_back(segments.back().t_end);
    return f;
}

double SlopeFunction::slope_at(TimestampS ts) const {
    if (ts < breakpoints.front() || ts > breakpoints.back()) {
        throw std::out_of_range("SlopeFunction: timestamp outside covered window");
    }
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), ts);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin());
    if (idx > 0) --idx;
    if (idx >= slopes.size()) idx = slopes.size() - 1;  // right endpoint
    return slopes[idx];
}

double epsilon_for_day(const TimeSeries& clearsky_day, double tau) {
    if (clearsky_day.empty()) {
        throw std::invalid_argument("epsilon_for_day: empty day");
    }
    const double day_max =
        *std::max_element(clearsky_day.values().begin(), clearsky_day.values().end());
    return tau * day_max;
}

std::vector<RampSegment> swinging_door(const TimeSeries& series, double eps) {
    if (eps < 0.0) {
        throw std::invalid_argument("swinging_door: epsilon must be non-negative");
    }
    if (series.size() < 2) {
        throw std::invalid_argument("swinging_door: need at least two samples");
    }
    const auto& t = series.timestamps();
    const auto& y = series.values();
    const std::size_t n = series.size();

    std::vector<RampSegment> segments;
    std::size_t pivot = 0;
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();

    for (std::size_t k = 1; k < n; ++k) {
        const double dt = static_cast<double>(t[k] - t[pivot]);
        const double up = (y[k] + eps - y[pivot]) / dt;
        const double low = (y[k] - eps - y[pivot]) / dt;
        const double next_upper = std::min(upper, up);
        const double next_lower = std::max(lower, low);
        if (next_lower > next_upper) {
            segments.push_back(make_segment(series, pivot, k - 1));
            pivot = k - 1;
            const double dt2 = static_cast<double>(t[k] - t[pivot]);
            upper = (y[k] + eps - y[pivot]) / dt2;
            lower = (y[k] - eps - y[pivot]) / dt2;
        } else {
            upper = next_upper;
            lower = next_lower;
        }
    }
    segments.push_back(make_segment(series, pivot, n - 1));
    return segments;
}

double ramp_score(const SlopeFunction& seg_test, const SlopeFunction& seg_ref,
                  TimestampS t_min, TimestampS t_max) {
    if (t_max <= t_min) {
        throw std::invalid_argument("ramp_score: zero-length interval");
    }
    if (seg_test.t_min() > t_min || seg_test.t_max() < t_max ||
        seg_ref.t_min() > t_min || seg_ref.t_max() < t_max) {
        throw std::invalid_argument("ramp_score: slope functions do not cover the interval");
    }

    std::vector<TimestampS> cuts;
    cuts.push_back(t_min);
    for (TimestampS b : seg_test.breakpoints) {
        if (b > t_min && b < t_max) cuts.push_back(b);
    }
    for (TimestampS b : seg_ref.breakpoints) {
        if (b > t_min && b < t_max) cuts.push_back(b);
    }
    cuts.push_back(t_max);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double diff =
            std::abs(seg_test.slope_at(cuts[i]) - seg_ref.slope_at(cuts[i]));
        integral += diff * static_cast<double>(cuts[i + 1] - cuts[i]);
    }
    return integral / static_cast<double>(t_max - t_min);
}

double multi_day_ramp_score(const AlignedPair& pair,
                            std::span<const double> ghi_clr, double tau) {
    if (ghi_clr.size() != pair.size()) {
        throw std::invalid_argument("multi_day_ramp_score: clear-sky array length mismatch");
    }
    double weighted_sum = 0.0;
    double weight_total = 0.0;

    std::size_t day_begin = 0;
    while (day_begin < pair.size()) {
        const std::int64_t day = utc_day_index(pair.timestamps[day_begin]);
        std::size_t day_end = day_begin + 1;
        while (day_end < pair.size() && utc_day_index(pair.timestamps[day_end]) == day) {
            ++day_end;
        }
        const std::size_t count = day_end - day_begin;
        if (count >= 2) {
            double clr_max = 0.0;
            for (std::size_t i = day_begin; i < day_end; ++i) {
                clr_max = std::max(clr_max, ghi_clr[i]);
            }
            const double eps = tau * clr_max;

            std::vector<TimestampS> ts(pair.timestamps.begin() + day_begin,
                                       pair.timestamps.begin() + day_end);
            TimeSeries day_test(ts, std::vector<double>(pair.test.begin() + day_begin,
                                                        pair.test.begin() + day_end));
            TimeSeries day_ref(std::move(ts),
                               std::vector<double>(pair.reference.begin() + day_begin,
                                                   pair.reference.begin() + day_end));

            const auto sf_test = SlopeFunction::from_segments(swinging_door(day_test, eps));
            const auto sf_ref = SlopeFunction::from_segments(swinging_door(day_ref, eps));
            const TimestampS lo = day_test.timestamps().front();
            const TimestampS hi = day_test.timestamps().back();
            const double weight = static_cast<double>(hi - lo);
            weighted_sum += ramp_score(sf_test, sf_ref, lo, hi) * weight;
            weight_total += weight;
        }
        day_begin = day_end;
    }
    if (weight_total <= 0.0) {
        throw std::runtime_error("multi_day_ramp_score: no day with at least two samples");
    }
    return weighted_sum / weight_total;
}

}  // namespace helioscore
