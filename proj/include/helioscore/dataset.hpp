#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "helioscore/series.hpp"

namespace helioscore {

/// One dataset row. Optional columns may be absent; intensities are mean
/// pixel values in [0, 255] for the long/short exposure frames.
struct Record {
    TimestampS timestamp;
    double ghi;
    std::optional<double> sza_deg;
    std::optional<double> saa_deg;
    std::optional<double> ghi_clr;
    std::optional<double> frame_mean_long;
    std::optional<double> frame_mean_short;
};

/// Column order of the dataset CSV (UTF-8, header required, ISO-8601 UTC
/// timestamps).
inline constexpr const char* kDatasetCsvHeader =
    "timestamp,ghi,sza_deg,saa_deg,ghi_clr,frame_mean_long,frame_mean_short";

/// Loads and validates a dataset CSV. Records come back sorted by
/// timestamp; malformed rows and duplicate timestamps raise
/// std::runtime_error naming the offending line.
std::vector<Record> load_csv(const std::string& path);

/// Writes records in the dataset CSV schema.
void write_csv(const std::string& path, const std::vector<Record>& records);

/// Mean pixel intensity of a raw 8-bit grayscale frame (P5-style header:
/// magic, width, height, maxval 255, then width*height pixel bytes).
double frame_mean(const std::string& path);

/// Per-record quality-control flags: a record is flagged when either
/// exposure channel's mean intensity jumps by more than gamma times the
/// previous record's value. The first record and records with missing
/// intensities (own or predecessor) are never flagged.
std::vector<bool> qc_filter(const std::vector<Record>& records, double gamma = 0.1);

enum class SplitRole { Train, Validation, Test };

/// Sample-selection policy for train/validation/test anchors.
struct SplitSpec {
    std::map<int, SplitRole> role_by_year;
    std::map<SplitRole, std::size_t> sample_counts;
    DurationS min_spacing = 240;  // seconds
    double sza_max_deg = 80.0;
    double gamma = 0.1;
    std::uint64_t rng_seed = 0;
};

struct SplitResult {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;

    const std::vector<std::size_t>& for_role(SplitRole role) const;
};

/**
 * Seeded random anchor selection. Candidates must carry an SZA below
 * sza_max_deg, be unflagged by QC, and belong to a year mapped to the role;
 * selected anchors are pairwise spaced by at least min_spacing. Selection
 * order is a seeded shuffle with greedy spacing, so a seed fully determines
 * the outcome. Indices come back sorted. Throws std::runtime_error naming
 * the shortfall when a role cannot reach its requested count.
 */
SplitResult select_samples(const std::vector<Record>& records, const SplitSpec& spec);

/// Windowing policy for TDM sequence sets.
struct SequenceSpec {
    std::size_t count = 100;
    std::size_t length = 100;
    DurationS min_gap = 1800;     // seconds between chosen windows
    DurationS cadence = 120;      // expected record spacing inside a window
    double sza_max_deg = 80.0;
    std::uint64_t rng_seed = 0;
    // When set, a shortfall returns the windows that were found instead of
    // throwing (used by report evaluation on small datasets).
    bool allow_shortfall = false;
};

/// Chosen sequence windows (start index + fixed length into the source
/// record array or grid they were built from).
struct SequenceSet {
    std::vector<std::size_t> starts;
    std::size_t length = 0;
    DurationS min_gap = 1800;
};

/// Seeded selection of windows of `length` consecutive records at the
/// exact cadence whose last record passes the SZA filter; chosen windows
/// are separated by at least min_gap. Throws on shortfall.
SequenceSet build_sequences(const std::vector<Record>& records, const SequenceSpec& spec);

/// Variant over a bare timestamp grid with per-point SZA (nullopt = fails
/// the filter), for grids derived from aligned pairs.
SequenceSet build_sequences(const std::vector<TimestampS>& timestamps,
                            const std::vector<std::optional<double>>& sza_deg,
                            const SequenceSpec& spec);

/// Appendix-style split histograms: per-month counts and counts over ten
/// equal SZA bins spanning [0, sza_max_deg).
struct SplitStats {
    std::array<std::size_t, 12> month_counts{};
    std::array<std::size_t, 10> sza_decile_counts{};
    double sza_max_deg = 80.0;
};

SplitStats split_stats(const std::vector<Record>& records,
                       const std::vector<std::size_t>& indices,
                       double sza_max_deg = 80.0);

/// Renders the histograms as a small CSV (kind,bin,count).
std::string split_stats_csv(const SplitStats& stats);

/// GHI series over all records (records are already time-sorted).
TimeSeries records_to_series(const std::vector<Record>& records, DurationS nominal_step = 120);

/// Clear-sky lookup table from the ghi_clr column; records without the
/// column are skipped.
std::map<TimestampS, double> clearsky_table(const std::vector<Record>& records);

}  // namespace helioscore
