#pragma once

#include <cstdint>
#include <vector>

#include "helioscore/dataset.hpp"
#include "helioscore/series.hpp"

namespace helioscore {

/// One cloud passage: the clear-sky index is multiplied by `attenuation`
/// over [start, start + duration], with linear transitions of width `edge`
/// at both ends.
struct CloudEvent {
    TimestampS start = 0;
    DurationS duration = 0;
    double attenuation = 1.0;  // factor in [0, 1]; 1 = no dimming
    DurationS edge = 0;
};

/**
 * Deterministic synthetic-sky recipe. The generated sky has clear-sky
 * index kc_base plus an optional sinusoidal intra-day drift, dimmed by the
 * cloud events, with optional multiplicative Gaussian noise on the index
 * (seeded; night values stay exactly zero because the noise acts on the
 * index, not on the irradiance).
 */
struct ScenarioSpec {
    double lat_deg = 48.7;
    double lon_deg = 2.2;
    TimestampS start = 0;  // inclusive
    TimestampS end = 0;    // exclusive
    DurationS cadence = 120;
    std::vector<CloudEvent> events;
    double kc_base = 1.0;
    double kc_drift_amplitude = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Analytic clear-sky GHI over the spec's grid, daylight points only
/// (zenith below 90°). A polar-night range yields an empty series.
TimeSeries gen_clear_day(const ScenarioSpec& spec);

/// Clear-sky series scaled by the spec's index profile (drift, cloud
/// events, noise). Throws std::invalid_argument on overlapping events or
/// out-of-range event parameters.
TimeSeries gen_cloud_transits(const ScenarioSpec& spec);

/// Same generator, emitted as full dataset records: solar angles, ghi_clr
/// and frame-mean intensities (derived deterministically from the index,
/// cloudier sky = brighter frame) are all populated.
std::vector<Record> scenario_records(const ScenarioSpec& spec);

/// Forecast whose value at t is the series value k steps earlier; horizon
/// metadata is k * nominal_step. k must be positive.
ForecastSeries lag_forecast(const TimeSeries& series, std::size_t k);

/// Lagging an existing forecast accumulates the horizons.
ForecastSeries lag_forecast(const ForecastSeries& forecast, std::size_t k);

/// Events at first_start, first_start + period, ... while they end before
/// `until`. period must exceed duration so the events cannot overlap.
std::vector<CloudEvent> periodic_events(TimestampS first_start, DurationS period,
                                        DurationS duration, double attenuation,
                                        DurationS edge, TimestampS until);

}  // namespace helioscore
