#include "helioscore/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helioscore {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace

SolarAngles solar_position(double lat_deg, double lon_deg, TimestampS ts) {
    if (std::abs(lat_deg) > 90.0 || std::abs(lon_deg) > 180.0) {
        throw std::invalid_argument("solar_position: latitude/longitude out of range");
    }

    const int doy = day_of_year(ts);
    const double hour_utc = seconds_of_day(ts) / 3600.0;

    // Fractional year in radians.
    const double g = 2.0 * kPi / 365.0 * (doy - 1 + (hour_utc - 12.0) / 24.0);

    // Equation of time (minutes) and declination (radians).
    const double eqtime = 229.18 * (0.000075
        + 0.001868 * std::cos(g) - 0.032077 * std::sin(g)
        - 0.014615 * std::cos(2.0 * g) - 0.040849 * std::sin(2.0 * g));
    const double decl = 0.006918
        - 0.399912 * std::cos(g) + 0.070257 * std::sin(g)
        - 0.006758 * std::cos(2.0 * g) + 0.000907 * std::sin(2.0 * g)
        - 0.002697 * std::cos(3.0 * g) + 0.00148 * std::sin(3.0 * g);

    // True solar time in minutes; longitude east-positive.
    const double tst = hour_utc * 60.0 + eqtime + 4.0 * lon_deg;
    const double ha_rad = (tst / 4.0 - 180.0) * kDegToRad;

    const double lat = lat_deg * kDegToRad;
    double cos_zen = std::sin(lat) * std::sin(decl)
                   + std::cos(lat) * std::cos(decl) * std::cos(ha_rad);
    cos_zen = std::clamp(cos_zen, -1.0, 1.0);
    const double sza = std::acos(cos_zen) * kRadToDeg;

    // Azimuth measured from south (westward positive), shifted to
    // north-clockwise compass convention.
    const double az_south = std::atan2(
        std::sin(ha_rad),
        std::cos(ha_rad) * std::sin(lat) - std::tan(decl) * std::cos(lat));
    double saa = az_south * kRadToDeg + 180.0;
    if (saa < 0.0) saa += 360.0;
    if (saa >= 360.0) saa -= 360.0;

    return SolarAngles{sza, saa};
}

double haurwitz_ghi(double sza_deg) {
    if (sza_deg >= 90.0) return 0.0;
    const double cos_z = std::cos(sza_deg * kDegToRad);
    return 1098.0 * cos_z * std::exp(-0.057 / cos_z);
}

ClearSkyProvider ClearSkyProvider::analytic(double lat_deg, double lon_deg) {
    ClearSkyProvider p;
    p.lat_deg_ = lat_deg;
    p.lon_deg_ = lon_deg;
    return p;
}

ClearSkyProvider ClearSkyProvider::from_table(std::map<TimestampS, double> table) {
    for (const auto& [ts, ghi] : table) {
        if (ghi < 0.0) {
            throw std::invalid_argument("ClearSkyProvider: negative clear-sky GHI in table");
        }
    }
    ClearSkyProvider p;
    p.table_ = std::move(table);
    return p;
}

double ClearSkyProvider::ghi_clr(TimestampS ts) const {
    if (!table_) {
        return haurwitz_ghi(solar_position(lat_deg_, lon_deg_, ts).sza_deg);
    }
    const auto it = table_->find(ts);
    if (it == table_->end()) {
        throw std::runtime_error("ClearSkyProvider: no clear-sky value at " +
                                 format_iso8601_utc(ts));
    }
    return it->second;
}

double clearsky_index(double ghi, double ghi_clr) {
    if (ghi < 0.0) {
        throw std::invalid_argument("clearsky_index: negative GHI");
    }
    if (ghi_clr < kClearSkyFloor) return 1.0;
    const double kc = ghi / ghi_clr;
    return std::clamp(kc, 0.0, kClearSkyIndexMax);
}

ForecastSeries smart_persistence(const TimeSeries& series,
                                 const ClearSkyProvider& provider,
                                 DurationS horizon) {
    if (horizon < 0 || horizon % series.nominal_step() != 0) {
        throw std::invalid_argument(
            "smart_persistence: horizon must be a non-negative multiple of the nominal step");
    }
    std::vector<TimestampS> out_ts;
    std::vector<double> out_vals;
    const auto& ts = series.timestamps();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const TimestampS target = ts[i] + horizon;
        if (series.index_of(target) < 0) continue;
        const double kc = clearsky_index(series.values()[i], provider.ghi_clr(ts[i]));
        out_ts.push_back(target);
        out_vals.push_back(kc * provider.ghi_clr(target));
    }
    return ForecastSeries(
        TimeSeries(std::move(out_ts), std::move(out_vals), series.nominal_step()),
        horizon, "smart_persistence");
}

ForecastSeries simple_persistence(const TimeSeries& series, DurationS horizon) {
    if (horizon < 0 || horizon % series.nominal_step() != 0) {
        throw std::invalid_argument(
            "simple_persistence: horizon must be a non-negative multiple of the nominal step");
    }
    std::vector<TimestampS> out_ts;
    std::vector<double> out_vals;
    const auto& ts = series.timestamps();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const TimestampS target = ts[i] + horizon;
        if (series.index_of(target) < 0) continue;
        out_ts.push_back(target);
        out_vals.push_back(series.values()[i]);
    }
    return ForecastSeries(
        TimeSeries(std::move(out_ts), std::move(out_vals), series.nominal_step()),
        horizon, "persistence");
}

}  // namespace helioscore
