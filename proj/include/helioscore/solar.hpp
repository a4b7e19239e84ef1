#pragma once

#include <map>
#include <optional>

#include "helioscore/series.hpp"

namespace helioscore {

/// Solar position: zenith angle in [0, 180], azimuth clockwise from north
/// in [0, 360).
struct SolarAngles {
    double sza_deg;
    double saa_deg;
};

/**
 * Low-accuracy astronomical solar position (declination, equation of time,
 * hour angle; NOAA's Fourier fits). Good to about 0.2 degrees, which is
 * plenty for clear-sky modelling and daylight filtering.
 */
SolarAngles solar_position(double lat_deg, double lon_deg, TimestampS ts);

/// Haurwitz clear-sky GHI for a zenith angle in degrees: zero at or below
/// the horizon, 1098 cos(z) exp(-0.057 / cos(z)) above it.
double haurwitz_ghi(double sza_deg);

/**
 * Clear-sky GHI source. Analytic mode evaluates Haurwitz at the site's
 * solar position; file-backed mode returns exact table values (typically
 * the dataset's ghi_clr column) and throws on timestamps it does not hold.
 */
class ClearSkyProvider {
public:
    static ClearSkyProvider analytic(double lat_deg, double lon_deg);
    static ClearSkyProvider from_table(std::map<TimestampS, double> table);

    double ghi_clr(TimestampS ts) const;
    bool is_analytic() const { return table_ == std::nullopt; }

private:
    ClearSkyProvider() = default;
    double lat_deg_ = 0.0;
    double lon_deg_ = 0.0;
    std::optional<std::map<TimestampS, double>> table_;
};

inline constexpr double kClearSkyFloor = 20.0;  // W/m²
inline constexpr double kClearSkyIndexMax = 1.5;

/// Clear-sky index k_c = ghi / ghi_clr, clamped to [0, 1.5]. Below the
/// 20 W/m² clear-sky floor (sunrise/sunset) the index is pinned to 1 so
/// persistence forecasts stay finite.
double clearsky_index(double ghi, double ghi_clr);

/// Smart persistence: Y*(t+dt) = k_c(t) * Y_clr(t+dt), emitted at every t
/// whose t+dt is also on the series grid.
ForecastSeries smart_persistence(const TimeSeries& series,
                                 const ClearSkyProvider& provider,
                                 DurationS horizon);

/// Plain persistence: Y*(t+dt) = Y(t).
ForecastSeries simple_persistence(const TimeSeries& series, DurationS horizon);

}  // namespace helioscore
