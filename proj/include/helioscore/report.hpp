#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "helioscore/dataset.hpp"
#include "helioscore/series.hpp"

namespace helioscore {

/// Evaluation settings shared by all rows of one report.
struct EvaluateConfig {
    std::vector<DurationS> horizons;  // seconds, each a multiple of the cadence
    double tau_cls = 0.05;
    double gamma = 0.1;
    double sza_max_deg = 80.0;
    std::uint64_t seed = 0;
    std::size_t sequence_count = 100;   // upper bound on TDM windows per row
    std::size_t sequence_length = 100;  // records per window
    DurationS sequence_gap = 1800;
    DurationS cadence = 120;
};

/// An externally produced forecast: values are predictions valid at their
/// own timestamps. The producer label keys the report row.
struct NamedForecast {
    std::string producer;
    TimeSeries series;
};

/**
 * One scored (producer, horizon) cell. Skill and ramp deltas are relative
 * to the smart-persistence baseline restricted to this row's evaluation
 * grid; the baseline values used are stored alongside so every percentage
 * can be recomputed from raw columns.
 */
struct ReportRow {
    std::string producer;
    DurationS horizon = 0;  // seconds
    std::size_t n = 0;      // aligned samples scored

    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double q95 = 0.0;
    double spm_mae = 0.0;
    double spm_mse = 0.0;
    double spm_rmse = 0.0;

    double fs_mae_pct = 0.0;
    double fs_mse_pct = 0.0;
    double fs_rmse_pct = 0.0;

    double ramp_score = 0.0;  // W/m²/min
    double spm_ramp_score = 0.0;
    double ramp_vs_spm_pct = 0.0;

    double tdi_pct = 0.0;
    double tdi_adv_pct = 0.0;
    double tdi_late_pct = 0.0;
    double tdm = 0.0;
    std::size_t sequences = 0;  // TDM windows aggregated (0 = too little data)
};

struct BenchmarkReport {
    static constexpr int kSchemaVersion = 1;

    std::vector<ReportRow> rows;  // horizon-major, baselines first
    std::string dataset_hash;     // "fnv1a64:<16 hex digits>"
    std::uint64_t seed = 0;
    double tau_cls = 0.05;
    double gamma = 0.1;
    double sza_max_deg = 80.0;
};

/**
 * Scores the baselines (smart persistence, then plain persistence) and
 * every named forecast at every horizon against the dataset's GHI. The
 * evaluation grid of a row is the intersection of the forecast grid, the
 * smart-persistence grid and the SZA-filtered observation grid. Requires
 * the dataset to carry ghi_clr values (the smart-persistence baseline is
 * built from them). Deterministic given (records, forecasts, config).
 */
BenchmarkReport evaluate(const std::vector<Record>& records,
                         const std::vector<NamedForecast>& forecasts,
                         const EvaluateConfig& config);

/// Machine interface: full-precision values, schema-versioned, stable key
/// order, byte-deterministic for identical inputs.
std::string report_json(const BenchmarkReport& report);

/// Human/plot interface: one row per cell, percentages to one decimal.
std::string report_csv(const BenchmarkReport& report);

/// Loads a producer forecast from a two-column CSV (header
/// "timestamp,value"); the producer label is supplied by the caller.
NamedForecast load_forecast_csv(const std::string& path, std::string producer);

/// 64-bit FNV-1a over raw bytes; used to fingerprint input datasets.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace helioscore
