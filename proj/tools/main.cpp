#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "helioscore/dataset.hpp"
#include "helioscore/distortion.hpp"
#include "helioscore/learner.hpp"
#include "helioscore/ramp.hpp"
#include "helioscore/report.hpp"
#include "helioscore/series.hpp"
#include "helioscore/solar.hpp"
#include "helioscore/synth.hpp"
#include "helioscore/timeutil.hpp"

namespace hs = helioscore;

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Accepts either a calendar date (midnight UTC) or a full timestamp.
hs::TimestampS parse_when(const std::string& text) {
    if (text.size() == 10) return hs::parse_iso8601_date(text);
    return hs::parse_iso8601_utc(text);
}

/// Loads (timestamp, value) rows from either a plain forecast CSV or a
/// full dataset CSV (using its ghi column).
hs::TimeSeries load_any_series(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::string header;
    std::getline(probe, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    probe.close();
    if (header == hs::kDatasetCsvHeader) {
        return hs::records_to_series(hs::load_csv(path));
    }
    return hs::load_forecast_csv(path, "series").series;
}

std::string iso(hs::TimestampS ts) { return hs::format_iso8601_utc(ts); }

// ---------------------------------------------------------------- synth --

struct SynthArgs {
    std::string out;
    double lat = 48.7;
    double lon = 2.2;
    std::string start = "2019-06-01";
    int days = 1;
    std::int64_t cadence = 120;
    double kc_base = 1.0;
    double kc_drift = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    // Periodic cloud transits (period 0 = clear sky).
    double transit_period_min = 0.0;
    double transit_duration_min = 20.0;
    double transit_attenuation = 0.3;
    double transit_edge_min = 2.0;
    double transit_first_min = 0.0;  // offset of the first transit into the range
};

void run_synth(const SynthArgs& args) {
    hs::ScenarioSpec spec;
    spec.lat_deg = args.lat;
    spec.lon_deg = args.lon;
    spec.start = parse_when(args.start);
    spec.end = spec.start + static_cast<hs::DurationS>(args.days) * 86400;
    spec.cadence = args.cadence;
    spec.kc_base = args.kc_base;
    spec.kc_drift_amplitude = args.kc_drift;
    spec.noise_sigma = args.noise;
    spec.seed = args.seed;
    if (args.transit_period_min > 0.0) {
        spec.events = hs::periodic_events(
            spec.start + static_cast<hs::DurationS>(args.transit_first_min * 60),
            static_cast<hs::DurationS>(args.transit_period_min * 60),
            static_cast<hs::DurationS>(args.transit_duration_min * 60),
            args.transit_attenuation,
            static_cast<hs::DurationS>(args.transit_edge_min * 60), spec.end);
    }
    const std::vector<hs::Record> records = hs::scenario_records(spec);
    hs::write_csv(args.out, records);
    std::cout << "wrote " << records.size() << " records to " << args.out << "\n";
}

// ------------------------------------------------------------- evaluate --

struct EvaluateArgs {
    std::string dataset;
    std::vector<std::string> forecasts;
    std::vector<std::int64_t> horizons_min;
    double tau_cls = 0.05;
    double gamma = 0.1;
    double sza_max = 80.0;
    std::uint64_t seed = 0;
    std::size_t sequence_count = 100;
    std::size_t sequence_length = 100;
    std::int64_t sequence_gap_min = 30;
    std::string out;
};

void run_evaluate(const EvaluateArgs& args) {
    const std::vector<hs::Record> records = hs::load_csv(args.dataset);

    std::vector<hs::NamedForecast> forecasts;
    for (const std::string& path : args.forecasts) {
        forecasts.push_back(
            hs::load_forecast_csv(path, std::filesystem::path(path).stem().string()));
    }

    hs::EvaluateConfig config;
    for (std::int64_t m : args.horizons_min) config.horizons.push_back(m * 60);
    config.tau_cls = args.tau_cls;
    config.gamma = args.gamma;
    config.sza_max_deg = args.sza_max;
    config.seed = args.seed;
    config.sequence_count = args.sequence_count;
    config.sequence_length = args.sequence_length;
    config.sequence_gap = args.sequence_gap_min * 60;

    hs::BenchmarkReport report = hs::evaluate(records, forecasts, config);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(hs::fnv1a64(read_bytes(args.dataset))));
    report.dataset_hash = hash;

    write_text(args.out + ".json", hs::report_json(report));
    write_text(args.out + ".csv", hs::report_csv(report));
    std::cout << "wrote " << report.rows.size() << " rows to " << args.out << ".json and "
              << args.out << ".csv\n";
}

// ---------------------------------------------------------------- ramps --

struct RampsArgs {
    std::string dataset;
    double epsilon_tau = 0.05;
    double epsilon_abs = -1.0;  // >= 0 overrides the daily tau rule
    std::string out;
};

void run_ramps(const RampsArgs& args) {
    const hs::TimeSeries series = load_any_series(args.dataset);
    std::string csv = "t_start,t_end,slope_w_m2_min\n";
    char buf[96];
    const auto emit = [&](const std::vector<hs::RampSegment>& segments) {
        for (const auto& seg : segments) {
            std::snprintf(buf, sizeof(buf), ",%.17g\n", seg.slope);
            csv += iso(seg.t_start) + "," + iso(seg.t_end) + buf;
        }
    };

    if (args.epsilon_abs >= 0.0) {
        emit(hs::swinging_door(series, args.epsilon_abs));
    } else {
        // Daily epsilon needs the clear-sky column of a dataset CSV.
        const std::vector<hs::Record> records = hs::load_csv(args.dataset);
        std::map<hs::TimestampS, std::vector<std::size_t>> by_day;
        for (std::size_t i = 0; i < records.size(); ++i) {
            by_day[hs::utc_day_index(records[i].timestamp)].push_back(i);
        }
        for (const auto& [day, idx] : by_day) {
            if (idx.size() < 2) continue;
            std::vector<hs::TimestampS> ts;
            std::vector<double> ghi, clr;
            for (std::size_t i : idx) {
                if (!records[i].ghi_clr) {
                    throw std::runtime_error("ramps: record " + iso(records[i].timestamp) +
                                             " has no ghi_clr; pass --epsilon instead");
                }
                ts.push_back(records[i].timestamp);
                ghi.push_back(records[i].ghi);
                clr.push_back(*records[i].ghi_clr);
            }
            const hs::TimeSeries day_clr(ts, clr);
            const double eps = hs::epsilon_for_day(day_clr, args.epsilon_tau);
            emit(hs::swinging_door(hs::TimeSeries(ts, ghi), eps));
        }
    }
    write_text(args.out, csv);
    std::cout << "wrote " << args.out << "\n";
}

// ----------------------------------------------------------- distortion --

struct DistortionArgs {
    std::string test;
    std::string reference;
    std::string out;
    std::string warp_path;  // optional CSV of the alignment path
};

void run_distortion(const DistortionArgs& args) {
    const hs::TimeSeries test = load_any_series(args.test);
    const hs::TimeSeries reference = load_any_series(args.reference);
    const hs::AlignedPair pair = hs::align(test, reference);

    const std::vector<double> test_norm = hs::minmax_normalize(pair.test);
    const std::vector<double> ref_norm = hs::minmax_normalize(pair.reference);
    const hs::WarpPath path = hs::dtw_path(test_norm, ref_norm);
    const hs::DistortionReport rep = hs::tdi_tdm(path);

    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["kind"] = "helioscore-distortion";
    doc["n"] = rep.n;
    doc["dtw_cost"] = path.cost;
    doc["tdi_pct"] = rep.tdi;
    doc["tdi_adv_pct"] = rep.tdi_adv;
    doc["tdi_late_pct"] = rep.tdi_late;
    doc["tdm"] = rep.tdm;
    write_text(args.out, doc.dump(2) + "\n");

    if (!args.warp_path.empty()) {
        std::string csv = "i,j\n";
        for (const auto& [i, j] : path.steps) {
            csv += std::to_string(i) + "," + std::to_string(j) + "\n";
        }
        write_text(args.warp_path, csv);
    }
    std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------- split --

struct SplitArgs {
    std::string dataset;
    std::vector<int> train_years, validation_years, test_years;
    std::size_t train_count = 0, validation_count = 0, test_count = 0;
    std::int64_t min_spacing_min = 4;
    double sza_max = 80.0;
    double gamma = 0.1;
    std::uint64_t seed = 0;
    std::string out_dir;
};

hs::SplitSpec split_spec_from(const SplitArgs& args) {
    hs::SplitSpec spec;
    for (int y : args.train_years) spec.role_by_year[y] = hs::SplitRole::Train;
    for (int y : args.validation_years) {
        if (spec.role_by_year.count(y)) {
            throw std::runtime_error("split: year " + std::to_string(y) +
                                     " assigned to two roles");
        }
        spec.role_by_year[y] = hs::SplitRole::Validation;
    }
    for (int y : args.test_years) {
        if (spec.role_by_year.count(y)) {
            throw std::runtime_error("split: year " + std::to_string(y) +
                                     " assigned to two roles");
        }
        spec.role_by_year[y] = hs::SplitRole::Test;
    }
    spec.sample_counts[hs::SplitRole::Train] = args.train_count;
    spec.sample_counts[hs::SplitRole::Validation] = args.validation_count;
    spec.sample_counts[hs::SplitRole::Test] = args.test_count;
    spec.min_spacing = args.min_spacing_min * 60;
    spec.sza_max_deg = args.sza_max;
    spec.gamma = args.gamma;
    spec.rng_seed = args.seed;
    return spec;
}

void run_split(const SplitArgs& args) {
    const std::vector<hs::Record> records = hs::load_csv(args.dataset);
    const hs::SplitSpec spec = split_spec_from(args);
    const hs::SplitResult result = hs::select_samples(records, spec);

    std::filesystem::create_directories(args.out_dir);
    const auto emit_role = [&](const char* name, const std::vector<std::size_t>& idx) {
        std::string csv = "timestamp\n";
        for (std::size_t i : idx) csv += iso(records[i].timestamp) + "\n";
        write_text(args.out_dir + "/" + name + ".csv", csv);
        write_text(args.out_dir + "/" + name + "_stats.csv",
                   hs::split_stats_csv(hs::split_stats(records, idx, args.sza_max)));
    };
    emit_role("train", result.train);
    emit_role("validation", result.validation);
    emit_role("test", result.test);
    std::cout << "wrote " << result.train.size() << "/" << result.validation.size() << "/"
              << result.test.size() << " train/validation/test samples to " << args.out_dir
              << "\n";
}

// ---------------------------------------------------------------- train --

struct TrainArgs {
    SplitArgs split;  // dataset, years, counts, filters, seed
    std::int64_t horizon_min = 10;
    std::string loss = "L2";
    double lr = 1e-4;
    double weight_decay = 1e-5;
    std::size_t batch = 10;
    std::size_t epochs = 100;
    std::size_t hidden = 0;
    std::vector<double> fractions;
    std::string out;
};

void run_train(const TrainArgs& args) {
    const std::vector<hs::Record> records = hs::load_csv(args.split.dataset);
    const hs::SplitSpec spec = split_spec_from(args.split);
    const hs::SplitResult split = hs::select_samples(records, spec);

    const hs::DurationS horizon = args.horizon_min * 60;
    const auto train_ex = hs::make_examples(records, split.train, horizon);
    const auto val_ex = hs::make_examples(records, split.validation, horizon);
    const auto test_ex = hs::make_examples(records, split.test, horizon);
    if (train_ex.empty() || val_ex.empty()) {
        throw std::runtime_error("train: no usable train/validation examples"
                                 " (check counts, years and horizon)");
    }

    hs::TrainConfig config;
    config.loss = args.loss == "L1" ? hs::LossKind::L1 : hs::LossKind::L2;
    config.weight_decay = args.weight_decay;
    config.learning_rate = args.lr;
    config.batch_size = args.batch;
    config.epochs = args.epochs;
    config.hidden = args.hidden;
    config.seed = args.split.seed;
    config.horizon = horizon;

    const hs::TrainResult result = hs::train(train_ex, val_ex, config);
    write_text(args.out + "_model.json", hs::checkpoint_to_json(result, config));
    write_text(args.out + "_history.csv", hs::history_csv(result.history));
    std::cout << "trained on " << train_ex.size() << " examples; best validation loss "
              << result.best_validation_loss << " at epoch " << result.best_epoch << "\n";

    if (!test_ex.empty()) {
        const double rmse_model = hs::model_rmse(result, test_ex);
        const double rmse_spm = hs::spm_rmse(test_ex);
        std::cout << "test RMSE " << rmse_model << " W/m² vs smart persistence "
                  << rmse_spm << " W/m² (FS_RMSE "
                  << (1.0 - rmse_model / rmse_spm) * 100.0 << "%)\n";
    }

    if (!args.fractions.empty()) {
        if (test_ex.empty()) {
            throw std::runtime_error("train: --fractions needs a test split");
        }
        const auto curve =
            hs::learning_curve(train_ex, val_ex, test_ex, config, args.fractions);
        std::string csv = "fraction,n_train,rmse_model,rmse_spm,fs_rmse\n";
        char buf[160];
        for (const auto& p : curve) {
            std::snprintf(buf, sizeof(buf), "%.4f,%zu,%.17g,%.17g,%.17g\n", p.fraction,
                          p.n_train, p.rmse_model, p.rmse_spm, p.fs_rmse);
            csv += buf;
        }
        write_text(args.out + "_curve.csv", csv);
        std::cout << "wrote learning curve (" << curve.size() << " points) to "
                  << args.out << "_curve.csv\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solar-irradiance forecast evaluation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    synth->add_option("--out", synth_args.out, "Output dataset CSV")->required();
    synth->add_option("--lat", synth_args.lat, "Site latitude, degrees");
    synth->add_option("--lon", synth_args.lon, "Site longitude, degrees");
    synth->add_option("--start", synth_args.start, "First day (YYYY-MM-DD or ISO time)");
    synth->add_option("--days", synth_args.days, "Number of days")->check(CLI::PositiveNumber);
    synth->add_option("--cadence", synth_args.cadence, "Record spacing, seconds");
    synth->add_option("--kc-base", synth_args.kc_base, "Baseline clear-sky index");
    synth->add_option("--kc-drift", synth_args.kc_drift, "Sinusoidal index drift amplitude");
    synth->add_option("--noise", synth_args.noise, "Multiplicative index noise sigma");
    synth->add_option("--seed", synth_args.seed, "RNG seed");
    synth->add_option("--transit-period", synth_args.transit_period_min,
                      "Cloud transit period, minutes (0 = clear)");
    synth->add_option("--transit-duration", synth_args.transit_duration_min,
                      "Transit duration, minutes");
    synth->add_option("--transit-attenuation", synth_args.transit_attenuation,
                      "Transit attenuation factor in [0,1]");
    synth->add_option("--transit-edge", synth_args.transit_edge_min,
                      "Transit edge-smoothing width, minutes");
    synth->add_option("--transit-first", synth_args.transit_first_min,
                      "Offset of the first transit, minutes into the range");
    synth->callback([&]() { run_synth(synth_args); });

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "Score forecasts against a dataset");
    eval->add_option("--dataset", eval_args.dataset, "Dataset CSV")->required();
    eval->add_option("--forecast", eval_args.forecasts,
                     "Forecast CSV (timestamp,value); repeatable");
    eval->add_option("--horizon", eval_args.horizons_min, "Horizon in minutes; repeatable")
        ->required();
    eval->add_option("--tau-cls", eval_args.tau_cls, "Swinging-door tolerance factor");
    eval->add_option("--gamma", eval_args.gamma, "QC jump threshold");
    eval->add_option("--sza-max", eval_args.sza_max, "Evaluation SZA cutoff, degrees");
    eval->add_option("--seed", eval_args.seed, "RNG seed for sequence selection");
    eval->add_option("--sequence-count", eval_args.sequence_count,
                     "Max distortion windows per row");
    eval->add_option("--sequence-length", eval_args.sequence_length,
                     "Records per distortion window");
    eval->add_option("--sequence-gap", eval_args.sequence_gap_min,
                     "Minimum gap between windows, minutes");
    eval->add_option("--out", eval_args.out, "Output base path (.json/.csv appended)")
        ->required();
    eval->callback([&]() { run_evaluate(eval_args); });

    RampsArgs ramps_args;
    auto* ramps = app.add_subcommand("ramps", "Extract swinging-door ramp segments");
    ramps->add_option("--dataset", ramps_args.dataset, "Dataset or series CSV")->required();
    ramps->add_option("--epsilon-tau", ramps_args.epsilon_tau,
                      "Daily tolerance factor (needs ghi_clr)");
    ramps->add_option("--epsilon", ramps_args.epsilon_abs,
                      "Absolute tolerance in W/m² (overrides --epsilon-tau)");
    ramps->add_option("--out", ramps_args.out, "Segment CSV path")->required();
    ramps->callback([&]() { run_ramps(ramps_args); });

    DistortionArgs dist_args;
    auto* dist = app.add_subcommand("distortion", "Temporal distortion between two series");
    dist->add_option("--test", dist_args.test, "Test series CSV")->required();
    dist->add_option("--reference", dist_args.reference, "Reference series CSV")->required();
    dist->add_option("--out", dist_args.out, "Report JSON path")->required();
    dist->add_option("--warp-path", dist_args.warp_path, "Optional warp-path CSV");
    dist->callback([&]() { run_distortion(dist_args); });

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "Select train/validation/test samples");
    split->add_option("--dataset", split_args.dataset, "Dataset CSV")->required();
    split->add_option("--train-years", split_args.train_years, "Training years")
        ->delimiter(',');
    split->add_option("--validation-years", split_args.validation_years,
                      "Validation years")
        ->delimiter(',');
    split->add_option("--test-years", split_args.test_years, "Test years")->delimiter(',');
    split->add_option("--train-count", split_args.train_count, "Training samples");
    split->add_option("--validation-count", split_args.validation_count,
                      "Validation samples");
    split->add_option("--test-count", split_args.test_count, "Test samples");
    split->add_option("--min-spacing", split_args.min_spacing_min,
                      "Minimum sample spacing, minutes");
    split->add_option("--sza-max", split_args.sza_max, "Candidate SZA cutoff, degrees");
    split->add_option("--gamma", split_args.gamma, "QC jump threshold");
    split->add_option("--seed", split_args.seed, "RNG seed");
    split->add_option("--out-dir", split_args.out_dir, "Output directory")->required();
    split->callback([&]() { run_split(split_args); });

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train the tabular baseline forecaster");
    train->add_option("--dataset", train_args.split.dataset, "Dataset CSV")->required();
    train->add_option("--train-years", train_args.split.train_years, "Training years")
        ->delimiter(',');
    train->add_option("--validation-years", train_args.split.validation_years,
                      "Validation years")
        ->delimiter(',');
    train->add_option("--test-years", train_args.split.test_years, "Test years")
        ->delimiter(',');
    train->add_option("--train-count", train_args.split.train_count, "Training samples");
    train->add_option("--validation-count", train_args.split.validation_count,
                      "Validation samples");
    train->add_option("--test-count", train_args.split.test_count, "Test samples");
    train->add_option("--min-spacing", train_args.split.min_spacing_min,
                      "Minimum sample spacing, minutes");
    train->add_option("--sza-max", train_args.split.sza_max, "Candidate SZA cutoff");
    train->add_option("--gamma", train_args.split.gamma, "QC jump threshold");
    train->add_option("--seed", train_args.split.seed, "RNG seed");
    train->add_option("--horizon", train_args.horizon_min, "Forecast horizon, minutes");
    train->add_option("--loss", train_args.loss, "Loss kind")
        ->check(CLI::IsMember({"L1", "L2"}));
    train->add_option("--lr", train_args.lr, "Learning rate");
    train->add_option("--weight-decay", train_args.weight_decay, "Weight decay lambda");
    train->add_option("--batch", train_args.batch, "Batch size");
    train->add_option("--epochs", train_args.epochs, "Training epochs");
    train->add_option("--hidden", train_args.hidden, "Hidden width (0 = linear)");
    train->add_option("--fractions", train_args.fractions,
                      "Learning-curve training fractions in (0,1]")
        ->delimiter(',');
    train->add_option("--out", train_args.out, "Output base path")->required();
    train->callback([&]() { run_train(train_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
