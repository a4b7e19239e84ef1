#include "helioscore/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "helioscore/distortion.hpp"
#include "helioscore/metrics.hpp"
#include "helioscore/ramp.hpp"
#include "helioscore/solar.hpp"

namespace helioscore {

namespace {

std::vector<TimestampS> intersect3(const std::vector<TimestampS>& a,
                                   const std::vector<TimestampS>& b,
                                   const std::vector<TimestampS>& c) {
    std::vector<TimestampS> ab;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(ab));
    std::vector<TimestampS> out;
    std::set_intersection(ab.begin(), ab.end(), c.begin(), c.end(),
                          std::back_inserter(out));
    return out;
}

/// Values of `series` at every grid timestamp; the grid must be a subset of
/// the series grid.
std::vector<double> values_on_grid(const TimeSeries& series,
                                   const std::vector<TimestampS>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    std::size_t i = 0;
    for (TimestampS ts : grid) {
        while (i < series.size() && series.timestamps()[i] < ts) ++i;
        if (i >= series.size() || series.timestamps()[i] != ts) {
            throw std::logic_error("values_on_grid: grid is not a subset");
        }
        out.push_back(series.values()[i]);
    }
    return out;
}

double skill_pct(double err_forecast, double err_reference) {
    if (err_forecast == err_reference) return 0.0;  // covers self-comparison
    return forecast_skill(err_forecast, err_reference) * 100.0;
}

struct RecordIndex {
    const std::vector<Record>* records;

    const Record& at(TimestampS ts) const {
        const auto it = std::lower_bound(
            records->begin(), records->end(), ts,
            [](const Record& r, TimestampS t) { return r.timestamp < t; });
        if (it == records->end() || it->timestamp != ts) {
            throw std::logic_error("evaluate: grid timestamp without a record");
        }
        return *it;
    }
};

ReportRow score_row(const std::string& producer, DurationS horizon,
                    const TimeSeries& forecast, const TimeSeries& spm,
                    const TimeSeries& observed, const RecordIndex& index,
                    const EvaluateConfig& config) {
    const std::vector<TimestampS> grid =
        intersect3(forecast.timestamps(), spm.timestamps(), observed.timestamps());
    if (grid.empty()) {
        throw std::runtime_error("evaluate: no overlap between forecast '" + producer +
                                 "' and the evaluation grid at horizon " +
                                 std::to_string(horizon / 60) + " min");
    }

    AlignedPair pair_f{grid, values_on_grid(forecast, grid), values_on_grid(observed, grid)};
    AlignedPair pair_s{grid, values_on_grid(spm, grid), pair_f.reference};

    const ErrorSummary err_f = error_summary(pair_f);
    const ErrorSummary err_s = error_summary(pair_s);

    ReportRow row;
    row.producer = producer;
    row.horizon = horizon;
    row.n = grid.size();
    row.mae = err_f.mae;
    row.mse = err_f.mse;
    row.rmse = err_f.rmse;
    row.q95 = err_f.q95_abs;
    row.spm_mae = err_s.mae;
    row.spm_mse = err_s.mse;
    row.spm_rmse = err_s.rmse;
    row.fs_mae_pct = skill_pct(err_f.mae, err_s.mae);
    row.fs_mse_pct = skill_pct(err_f.mse, err_s.mse);
    row.fs_rmse_pct = skill_pct(err_f.rmse, err_s.rmse);

    std::vector<double> clr;
    clr.reserve(grid.size());
    for (TimestampS ts : grid) clr.push_back(*index.at(ts).ghi_clr);
    row.ramp_score = multi_day_ramp_score(pair_f, clr, config.tau_cls);
    row.spm_ramp_score = multi_day_ramp_score(pair_s, clr, config.tau_cls);
    if (row.ramp_score == row.spm_ramp_score) {
        row.ramp_vs_spm_pct = 0.0;
    } else if (row.spm_ramp_score == 0.0) {
        throw std::runtime_error("evaluate: degenerate ramp baseline for '" + producer +
                                 "' (smart-persistence ramp score is zero)");
    } else {
        row.ramp_vs_spm_pct = (row.ramp_score / row.spm_ramp_score - 1.0) * 100.0;
    }

    std::vector<std::optional<double>> sza;
    sza.reserve(grid.size());
    for (TimestampS ts : grid) sza.push_back(index.at(ts).sza_deg);
    SequenceSpec seq_spec;
    seq_spec.count = config.sequence_count;
    seq_spec.length = config.sequence_length;
    seq_spec.min_gap = config.sequence_gap;
    seq_spec.cadence = config.cadence;
    seq_spec.sza_max_deg = config.sza_max_deg;
    seq_spec.rng_seed = config.seed;
    seq_spec.allow_shortfall = true;
    const SequenceSet windows = build_sequences(grid, sza, seq_spec);

    std::vector<DistortionReport> reports;
    reports.reserve(windows.starts.size());
    for (std::size_t start : windows.starts) {
        AlignedPair window;
        const auto begin = static_cast<std::ptrdiff_t>(start);
        const auto end = begin + static_cast<std::ptrdiff_t>(windows.length);
        window.timestamps.assign(grid.begin() + begin, grid.begin() + end);
        window.test.assign(pair_f.test.begin() + begin, pair_f.test.begin() + end);
        window.reference.assign(pair_f.reference.begin() + begin,
                                pair_f.reference.begin() + end);
        reports.push_back(sequence_distortion(window));
    }
    if (!reports.empty()) {
        const DistortionReport agg = aggregate_distortion(reports);
        row.tdi_pct = agg.tdi;
        row.tdi_adv_pct = agg.tdi_adv;
        row.tdi_late_pct = agg.tdi_late;
        row.tdm = agg.tdm;
    }
    row.sequences = reports.size();
    return row;
}

}  // namespace

BenchmarkReport evaluate(const std::vector<Record>& records,
                         const std::vector<NamedForecast>& forecasts,
                         const EvaluateConfig& config) {
    if (records.empty()) {
        throw std::invalid_argument("evaluate: empty dataset");
    }
    if (config.horizons.empty()) {
        throw std::invalid_argument("evaluate: no horizons requested");
    }
    for (DurationS h : config.horizons) {
        if (h < 0 || h % config.cadence != 0) {
            throw std::invalid_argument("evaluate: horizon must be a non-negative"
                                        " multiple of the cadence");
        }
    }
    if (config.sequence_length < 2) {
        throw std::invalid_argument("evaluate: sequence length must be >= 2");
    }

    const std::map<TimestampS, double> table = clearsky_table(records);
    if (table.empty()) {
        throw std::runtime_error("evaluate: dataset has no ghi_clr values; the"
                                 " smart-persistence baseline needs them");
    }
    const ClearSkyProvider provider = ClearSkyProvider::from_table(table);

    std::vector<TimestampS> base_ts, obs_ts;
    std::vector<double> base_v, obs_v;
    for (const Record& rec : records) {
        if (rec.ghi_clr) {
            base_ts.push_back(rec.timestamp);
            base_v.push_back(rec.ghi);
        }
        if (rec.sza_deg && *rec.sza_deg < config.sza_max_deg) {
            obs_ts.push_back(rec.timestamp);
            obs_v.push_back(rec.ghi);
        }
    }
    if (obs_ts.empty()) {
        throw std::runtime_error("evaluate: no observations pass the SZA filter");
    }
    const TimeSeries base(std::move(base_ts), std::move(base_v), config.cadence);
    const TimeSeries observed(std::move(obs_ts), std::move(obs_v), config.cadence);
    const RecordIndex index{&records};

    BenchmarkReport report;
    report.seed = config.seed;
    report.tau_cls = config.tau_cls;
    report.gamma = config.gamma;
    report.sza_max_deg = config.sza_max_deg;

    std::vector<DurationS> horizons = config.horizons;
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

    for (DurationS h : horizons) {
        const ForecastSeries spm = smart_persistence(base, provider, h);
        const ForecastSeries pers = simple_persistence(base, h);

        std::vector<std::pair<std::string, const TimeSeries*>> sources;
        sources.emplace_back("smart_persistence", &spm.inner);
        sources.emplace_back("persistence", &pers.inner);
        for (const NamedForecast& nf : forecasts) {
            sources.emplace_back(nf.producer, &nf.series);
        }
        for (const auto& [producer, series] : sources) {
            report.rows.push_back(
                score_row(producer, h, *series, spm.inner, observed, index, config));
        }
    }
    return report;
}

std::string report_json(const BenchmarkReport& report) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = BenchmarkReport::kSchemaVersion;
    doc["kind"] = "helioscore-report";
    doc["dataset_hash"] = report.dataset_hash;
    doc["config"]["seed"] = report.seed;
    doc["config"]["tau_cls"] = report.tau_cls;
    doc["config"]["gamma"] = report.gamma;
    doc["config"]["sza_max_deg"] = report.sza_max_deg;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const ReportRow& row : report.rows) {
        nlohmann::ordered_json r;
        r["producer"] = row.producer;
        r["horizon_min"] = row.horizon / 60;
        r["horizon_s"] = row.horizon;
        r["n"] = row.n;
        r["mae"] = row.mae;
        r["mse"] = row.mse;
        r["rmse"] = row.rmse;
        r["q95"] = row.q95;
        r["spm_mae"] = row.spm_mae;
        r["spm_mse"] = row.spm_mse;
        r["spm_rmse"] = row.spm_rmse;
        r["fs_mae_pct"] = row.fs_mae_pct;
        r["fs_mse_pct"] = row.fs_mse_pct;
        r["fs_rmse_pct"] = row.fs_rmse_pct;
        r["ramp_score"] = row.ramp_score;
        r["spm_ramp_score"] = row.spm_ramp_score;
        r["ramp_vs_spm_pct"] = row.ramp_vs_spm_pct;
        r["tdi_pct"] = row.tdi_pct;
        r["tdi_adv_pct"] = row.tdi_adv_pct;
        r["tdi_late_pct"] = row.tdi_late_pct;
        r["tdm"] = row.tdm;
        r["sequences"] = row.sequences;
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

std::string report_csv(const BenchmarkReport& report) {
    std::string out =
        "producer,horizon_min,n,mae,mse,rmse,q95,fs_mae_pct,fs_mse_pct,fs_rmse_pct,"
        "ramp_score,ramp_vs_spm_pct,tdi_pct,tdm,sequences\n";
    char buf[256];
    for (const ReportRow& row : report.rows) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%lld,%zu,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,"
                      "%.2f,%zu\n",
                      row.producer.c_str(), static_cast<long long>(row.horizon / 60),
                      row.n, row.mae, row.mse, row.rmse, row.q95, row.fs_mae_pct,
                      row.fs_mse_pct, row.fs_rmse_pct, row.ramp_score,
                      row.ramp_vs_spm_pct, row.tdi_pct, row.tdm, row.sequences);
        out += buf;
    }
    return out;
}

NamedForecast load_forecast_csv(const std::string& path, std::string producer) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_forecast_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_forecast_csv: empty file '" + path + "'");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value") {
        throw std::runtime_error("load_forecast_csv: unexpected header '" + line +
                                 "' in '" + path + "'");
    }
    std::vector<std::pair<TimestampS, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 'timestamp,value'");
        }
        TimestampS ts;
        try {
            ts = parse_iso8601_utc(line.substr(0, comma));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        double value;
        try {
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": bad value '" + line.substr(comma + 1) + "'");
        }
        if (!std::isfinite(value)) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": non-finite value");
        }
        rows.emplace_back(ts, value);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first) {
            throw std::runtime_error("load_forecast_csv: duplicate timestamp " +
                                     format_iso8601_utc(rows[i].first));
        }
    }
    std::vector<TimestampS> ts(rows.size());
    std::vector<double> vs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ts[i] = rows[i].first;
        vs[i] = rows[i].second;
    }
    return NamedForecast{std::move(producer), TimeSeries(std::move(ts), std::move(vs))};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace helioscore
