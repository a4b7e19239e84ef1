#include "helioscore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "helioscore/rng.hpp"
#include "helioscore/solar.hpp"

namespace helioscore {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

std::vector<CloudEvent> validated_events(const ScenarioSpec& spec) {
    std::vector<CloudEvent> events = spec.events;
    for (const auto& ev : events) {
        if (ev.duration <= 0) {
            throw std::invalid_argument("scenario: event duration must be positive");
        }
        if (ev.attenuation < 0.0 || ev.attenuation > 1.0) {
            throw std::invalid_argument("scenario: attenuation must lie in [0, 1]");
        }
        if (ev.edge < 0 || 2 * ev.edge > ev.duration) {
            throw std::invalid_argument("scenario: edge width must fit inside the event");
        }
    }
    std::sort(events.begin(), events.end(),
              [](const CloudEvent& a, const CloudEvent& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].start < events[i - 1].start + events[i - 1].duration) {
            throw std::invalid_argument("scenario: overlapping cloud events");
        }
    }
    return events;
}

double event_factor(const std::vector<CloudEvent>& events, TimestampS ts) {
    for (const auto& ev : events) {
        const TimestampS end = ev.start + ev.duration;
        if (ts <= ev.start || ts >= end) continue;
        const double depth = 1.0 - ev.attenuation;
        if (ev.edge > 0 && ts < ev.start + ev.edge) {
            return 1.0 - depth * static_cast<double>(ts - ev.start) /
                             static_cast<double>(ev.edge);
        }
        if (ev.edge > 0 && ts > end - ev.edge) {
            return 1.0 - depth * static_cast<double>(end - ts) /
                             static_cast<double>(ev.edge);
        }
        return ev.attenuation;
    }
    return 1.0;
}

void validate_grid(const ScenarioSpec& spec) {
    if (spec.cadence <= 0) {
        throw std::invalid_argument("scenario: cadence must be positive");
    }
    if (spec.end < spec.start) {
        throw std::invalid_argument("scenario: date range end precedes start");
    }
}

}  // namespace

TimeSeries gen_clear_day(const ScenarioSpec& spec) {
    validate_grid(spec);
    std::vector<TimestampS> ts;
    std::vector<double> ghi;
    for (TimestampS t = spec.start; t < spec.end; t += spec.cadence) {
        const SolarAngles angles = solar_position(spec.lat_deg, spec.lon_deg, t);
        if (angles.sza_deg >= 90.0) continue;
        ts.push_back(t);
        ghi.push_back(haurwitz_ghi(angles.sza_deg));
    }
    return TimeSeries(std::move(ts), std::move(ghi), spec.cadence);
}

std::vector<Record> scenario_records(const ScenarioSpec& spec) {
    validate_grid(spec);
    const std::vector<CloudEvent> events = validated_events(spec);
    Rng rng(spec.seed);

    std::vector<Record> records;
    for (TimestampS t = spec.start; t < spec.end; t += spec.cadence) {
        const SolarAngles angles = solar_position(spec.lat_deg, spec.lon_deg, t);
        if (angles.sza_deg >= 90.0) continue;
        const double clr = haurwitz_ghi(angles.sza_deg);

        const double day_phase =
            static_cast<double>(seconds_of_day(t)) / 86400.0;
        double kc = spec.kc_base +
                    spec.kc_drift_amplitude * std::sin(kTwoPi * day_phase);
        kc = std::clamp(kc, 0.0, kClearSkyIndexMax);
        kc *= event_factor(events, t);
        if (spec.noise_sigma > 0.0) {
            kc *= 1.0 + spec.noise_sigma * rng.next_gaussian();
            kc = std::clamp(kc, 0.0, kClearSkyIndexMax);
        }

        Record rec;
        rec.timestamp = t;
        rec.ghi = kc * clr;
        rec.sza_deg = angles.sza_deg;
        rec.saa_deg = angles.saa_deg;
        rec.ghi_clr = clr;
        rec.frame_mean_long = std::clamp(80.0 + 100.0 * (1.0 - kc), 0.0, 255.0);
        rec.frame_mean_short = std::clamp(40.0 + 60.0 * (1.0 - kc), 0.0, 255.0);
        records.push_back(rec);
    }
    return records;
}

TimeSeries gen_cloud_transits(const ScenarioSpec& spec) {
    const std::vector<Record> records = scenario_records(spec);
    std::vector<TimestampS> ts(records.size());
    std::vector<double> ghi(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        ts[i] = records[i].timestamp;
        ghi[i] = records[i].ghi;
    }
    return TimeSeries(std::move(ts), std::move(ghi), spec.cadence);
}

ForecastSeries lag_forecast(const TimeSeries& series, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("lag_forecast: lag must be positive");
    }
    std::vector<TimestampS> ts;
    std::vector<double> values;
    if (series.size() > k) {
        ts.assign(series.timestamps().begin() + static_cast<std::ptrdiff_t>(k),
                  series.timestamps().end());
        values.assign(series.values().begin(),
                      series.values().end() - static_cast<std::ptrdiff_t>(k));
    }
    TimeSeries inner(std::move(ts), std::move(values), series.nominal_step());
    return ForecastSeries(std::move(inner),
                          static_cast<DurationS>(k) * series.nominal_step(),
                          "lag_forecast");
}

ForecastSeries lag_forecast(const ForecastSeries& forecast, std::size_t k) {
    ForecastSeries lagged = lag_forecast(forecast.inner, k);
    return ForecastSeries(lagged.inner, forecast.horizon + lagged.horizon,
                          forecast.producer);
}

std::vector<CloudEvent> periodic_events(TimestampS first_start, DurationS period,
                                        DurationS duration, double attenuation,
                                        DurationS edge, TimestampS until) {
    if (period <= duration) {
        throw std::invalid_argument("periodic_events: period must exceed the duration");
    }
    std::vector<CloudEvent> events;
    for (TimestampS start = first_start; start + duration <= until; start += period) {
        events.push_back(CloudEvent{start, duration, attenuation, edge});
    }
    return events;
}

}  // namespace helioscore
