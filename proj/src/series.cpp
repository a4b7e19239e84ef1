#include "helioscore/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace helioscore {

TimeSeries::TimeSeries(std::vector<TimestampS> timestamps, std::vector<double> values,
                       DurationS nominal_step)
    : timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      nominal_step_(nominal_step) {
    if (timestamps_.size() != values_.size()) {
        throw std::invalid_argument("TimeSeries: timestamp/value length mismatch");
    }
    if (nominal_step_ <= 0) {
        throw std::invalid_argument("TimeSeries: nominal_step must be positive");
    }
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (timestamps_[i] <= timestamps_[i - 1]) {
            throw std::invalid_argument("TimeSeries: timestamps must be strictly increasing");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("TimeSeries: values must be finite");
        }
    }
}

std::ptrdiff_t TimeSeries::index_of(TimestampS ts) const {
    const auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), ts);
    if (it == timestamps_.end() || *it != ts) return -1;
    return it - timestamps_.begin();
}

ForecastSeries::ForecastSeries(TimeSeries series, DurationS horizon_s,
                               std::string producer_label)
    : inner(std::move(series)), horizon(horizon_s), producer(std::move(producer_label)) {
    if (horizon < 0 || horizon % inner.nominal_step() != 0) {
        throw std::invalid_argument(
            "ForecastSeries: horizon must be a non-negative multiple of the nominal step");
    }
}

AlignedPair align(const TimeSeries& test, const TimeSeries& reference) {
    AlignedPair pair;
    const auto& ta = test.timestamps();
    const auto& tb = reference.timestamps();
    std::size_t i = 0, j = 0;
    while (i < ta.size() && j < tb.size()) {
        if (ta[i] == tb[j]) {
            pair.timestamps.push_back(ta[i]);
            pair.test.push_back(test.values()[i]);
            pair.reference.push_back(reference.values()[j]);
            ++i;
            ++j;
        } else if (ta[i] < tb[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    if (pair.timestamps.empty()) {
        throw std::runtime_error("align: no overlap between test and reference grids");
    }
    return pair;
}

AlignedPair align(const ForecastSeries& test, const TimeSeries& reference) {
    return align(test.inner, reference);
}

std::vector<double> minmax_normalize(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("minmax_normalize: empty input");
    }
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *min_it, hi = *max_it;
    std::vector<double> out(values.size());
    if (hi == lo) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - lo) / span;
    }
    return out;
}

std::vector<TimeSeries> split_contiguous(const TimeSeries& series, DurationS max_gap) {
    std::vector<TimeSeries> segments;
    if (series.empty()) return segments;

    const auto& ts = series.timestamps();
    const auto& vs = series.values();
    std::size_t start = 0;
    for (std::size_t i = 1; i <= ts.size(); ++i) {
        const bool boundary = (i == ts.size()) || (ts[i] - ts[i - 1] > max_gap);
        if (!boundary) continue;
        segments.emplace_back(
            std::vector<TimestampS>(ts.begin() + start, ts.begin() + i),
            std::vector<double>(vs.begin() + start, vs.begin() + i),
            series.nominal_step());
        start = i;
    }
    return segments;
}

}  // namespace helioscore
