#include "helioscore/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "helioscore/rng.hpp"
#include "helioscore/timeutil.hpp"

namespace helioscore {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::optional<double> parse_optional(const std::string& field, std::size_t line_no,
                                     const char* name) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad " +
                                 name + " value '" + field + "'");
    }
    return value;
}

double parse_required(const std::string& field, std::size_t line_no, const char* name) {
    const auto v = parse_optional(field, line_no, name);
    if (!v) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": missing " + name);
    }
    return *v;
}

}  // namespace

std::vector<Record> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_csv: empty file '" + path + "'");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDatasetCsvHeader) {
        throw std::runtime_error("load_csv: unexpected header '" + line + "'");
    }

    std::vector<Record> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != 7) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 7 fields, got " +
                                     std::to_string(fields.size()));
        }
        Record rec;
        try {
            rec.timestamp = parse_iso8601_utc(fields[0]);
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        rec.ghi = parse_required(fields[1], line_no, "ghi");
        if (rec.ghi < 0.0) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": negative ghi " + fields[1]);
        }
        rec.sza_deg = parse_optional(fields[2], line_no, "sza_deg");
        rec.saa_deg = parse_optional(fields[3], line_no, "saa_deg");
        rec.ghi_clr = parse_optional(fields[4], line_no, "ghi_clr");
        rec.frame_mean_long = parse_optional(fields[5], line_no, "frame_mean_long");
        rec.frame_mean_short = parse_optional(fields[6], line_no, "frame_mean_short");
        for (const auto& intensity : {rec.frame_mean_long, rec.frame_mean_short}) {
            if (intensity && (*intensity < 0.0 || *intensity > 255.0)) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": frame mean outside [0,255]");
            }
        }
        records.push_back(rec);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const Record& a, const Record& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].timestamp == records[i - 1].timestamp) {
            throw std::runtime_error("load_csv: duplicate timestamp " +
                                     format_iso8601_utc(records[i].timestamp));
        }
    }
    return records;
}

namespace {

void append_optional(std::string& out, const std::optional<double>& value) {
    out.push_back(',');
    if (value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", *value);
        out += buf;
    }
}

}  // namespace

void write_csv(const std::string& path, const std::vector<Record>& records) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    }
    out << kDatasetCsvHeader << '\n';
    std::string row;
    for (const auto& rec : records) {
        row = format_iso8601_utc(rec.timestamp);
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%.6f", rec.ghi);
        row += buf;
        append_optional(row, rec.sza_deg);
        append_optional(row, rec.saa_deg);
        append_optional(row, rec.ghi_clr);
        append_optional(row, rec.frame_mean_long);
        append_optional(row, rec.frame_mean_short);
        out << row << '\n';
    }
}

double frame_mean(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("frame_mean: cannot open '" + path + "'");
    }
    std::string magic;
    long width = 0, height = 0, maxval = 0;
    in >> magic >> width >> height >> maxval;
    if (magic != "P5" || width <= 0 || height <= 0 || maxval != 255) {
        throw std::runtime_error("frame_mean: '" + path + "' is not an 8-bit P5 frame");
    }
    in.get();  // single whitespace after the header
    std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != pixels.size()) {
        throw std::runtime_error("frame_mean: truncated pixel data in '" + path + "'");
    }
    std::uint64_t sum = 0;
    for (unsigned char p : pixels) sum += p;
    return static_cast<double>(sum) / static_cast<double>(pixels.size());
}

std::vector<bool> qc_filter(const std::vector<Record>& records, double gamma) {
    std::vector<bool> flags(records.size(), false);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto jump = [&](const std::optional<double>& cur,
                              const std::optional<double>& prev) {
            if (!cur || !prev) return false;
            return *cur - *prev > gamma * *prev;
        };
        flags[i] = jump(records[i].frame_mean_long, records[i - 1].frame_mean_long) ||
                   jump(records[i].frame_mean_short, records[i - 1].frame_mean_short);
    }
    return flags;
}

const std::vector<std::size_t>& SplitResult::for_role(SplitRole role) const {
    switch (role) {
        case SplitRole::Train: return train;
        case SplitRole::Validation: return validation;
        default: return test;
    }
}

namespace {

const char* role_name(SplitRole role) {
    switch (role) {
        case SplitRole::Train: return "train";
        case SplitRole::Validation: return "validation";
        default: return "test";
    }
}

std::vector<std::size_t> pick_spaced(std::vector<std::size_t> candidates,
                                     const std::vector<Record>& records,
                                     std::size_t count, DurationS min_spacing,
                                     Rng& rng, const char* what) {
    rng.shuffle(candidates);
    std::vector<std::size_t> chosen;
    std::vector<TimestampS> chosen_ts;
    for (std::size_t idx : candidates) {
        if (chosen.size() == count) break;
        const TimestampS ts = records[idx].timestamp;
        bool ok = true;
        for (TimestampS other : chosen_ts) {
            if (std::abs(ts - other) < min_spacing) {
                ok = false;
                break;
            }
        }
        if (ok) {
            chosen.push_back(idx);
            chosen_ts.push_back(ts);
        }
    }
    if (chosen.size() < count) {
        throw std::runtime_error(std::string("select_samples: ") + what +
                                 " shortfall: wanted " + std::to_string(count) +
                                 ", found " + std::to_string(chosen.size()));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

SplitResult select_samples(const std::vector<Record>& records, const SplitSpec& spec) {
    const std::vector<bool> flagged = qc_filter(records, spec.gamma);

    std::map<SplitRole, std::vector<std::size_t>> candidates;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (flagged[i]) continue;
        if (!records[i].sza_deg || *records[i].sza_deg >= spec.sza_max_deg) continue;
        const auto it = spec.role_by_year.find(utc_year(records[i].timestamp));
        if (it == spec.role_by_year.end()) continue;
        candidates[it->second].push_back(i);
    }

    Rng rng(spec.rng_seed);
    SplitResult result;
    // Fixed role order keeps the RNG stream independent of map iteration.
    for (SplitRole role : {SplitRole::Train, SplitRole::Validation, SplitRole::Test}) {
        const auto count_it = spec.sample_counts.find(role);
        const std::size_t count = count_it == spec.sample_counts.end() ? 0 : count_it->second;
        if (count == 0) continue;
        auto chosen = pick_spaced(candidates[role], records, count, spec.min_spacing,
                                  rng, role_name(role));
        switch (role) {
            case SplitRole::Train: result.train = std::move(chosen); break;
            case SplitRole::Validation: result.validation = std::move(chosen); break;
            default: result.test = std::move(chosen); break;
        }
    }
    return result;
}

SequenceSet build_sequences(const std::vector<TimestampS>& timestamps,
                            const std::vector<std::optional<double>>& sza_deg,
                            const SequenceSpec& spec) {
    if (spec.length < 2) {
        throw std::invalid_argument("build_sequences: window length must be >= 2");
    }
    const std::size_t n = timestamps.size();

    // run_length[i] = number of consecutive samples starting at i with the
    // exact cadence spacing.
    std::vector<std::size_t> run_length(n, 1);
    for (std::size_t i = n; i-- > 1;) {
        if (timestamps[i] - timestamps[i - 1] == spec.cadence) {
            run_length[i - 1] = run_length[i] + 1;
        }
    }

    std::vector<std::size_t> eligible;
    for (std::size_t start = 0; start + spec.length <= n; ++start) {
        if (run_length[start] < spec.length) continue;
        const std::size_t last = start + spec.length - 1;
        if (!sza_deg[last] || *sza_deg[last] >= spec.sza_max_deg) continue;
        eligible.push_back(start);
    }

    Rng rng(spec.rng_seed);
    rng.shuffle(eligible);

    SequenceSet set;
    set.length = spec.length;
    set.min_gap = spec.min_gap;
    std::vector<std::pair<TimestampS, TimestampS>> taken;  // [start, end] spans
    for (std::size_t start : eligible) {
        if (set.starts.size() == spec.count) break;
        const TimestampS lo = timestamps[start];
        const TimestampS hi = timestamps[start + spec.length - 1];
        bool ok = true;
        for (const auto& [tlo, thi] : taken) {
            if (lo < thi + spec.min_gap && tlo < hi + spec.min_gap) {
                ok = false;
                break;
            }
        }
        if (ok) {
            set.starts.push_back(start);
            taken.emplace_back(lo, hi);
        }
    }
    if (set.starts.size() < spec.count && !spec.allow_shortfall) {
        throw std::runtime_error("build_sequences: shortfall: wanted " +
                                 std::to_string(spec.count) + " windows, found " +
                                 std::to_string(set.starts.size()));
    }
    std::sort(set.starts.begin(), set.starts.end());
    return set;
}

SequenceSet build_sequences(const std::vector<Record>& records, const SequenceSpec& spec) {
    std::vector<TimestampS> ts(records.size());
    std::vector<std::optional<double>> sza(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        ts[i] = records[i].timestamp;
        sza[i] = records[i].sza_deg;
    }
    return build_sequences(ts, sza, spec);
}

SplitStats split_stats(const std::vector<Record>& records,
                       const std::vector<std::size_t>& indices,
                       double sza_max_deg) {
    SplitStats stats;
    stats.sza_max_deg = sza_max_deg;
    for (std::size_t idx : indices) {
        if (idx >= records.size()) {
            throw std::out_of_range("split_stats: index out of range");
        }
        const Record& rec = records[idx];
        stats.month_counts[static_cast<std::size_t>(utc_month(rec.timestamp) - 1)]++;
        if (rec.sza_deg && *rec.sza_deg >= 0.0 && *rec.sza_deg < sza_max_deg) {
            const auto bin = static_cast<std::size_t>(*rec.sza_deg / sza_max_deg * 10.0);
            stats.sza_decile_counts[std::min<std::size_t>(bin, 9)]++;
        }
    }
    return stats;
}

std::string split_stats_csv(const SplitStats& stats) {
    std::ostringstream out;
    out << "kind,bin,count\n";
    for (std::size_t m = 0; m < 12; ++m) {
        out << "month," << (m + 1) << ',' << stats.month_counts[m] << '\n';
    }
    for (std::size_t d = 0; d < 10; ++d) {
        char label[48];
        std::snprintf(label, sizeof(label), "sza_%.1f_%.1f",
                      stats.sza_max_deg / 10.0 * static_cast<double>(d),
                      stats.sza_max_deg / 10.0 * static_cast<double>(d + 1));
        out << label << ',' << d << ',' << stats.sza_decile_counts[d] << '\n';
    }
    return out.str();
}

TimeSeries records_to_series(const std::vector<Record>& records, DurationS nominal_step) {
    std::vector<TimestampS> ts(records.size());
    std::vector<double> vs(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        ts[i] = records[i].timestamp;
        vs[i] = records[i].ghi;
    }
    return TimeSeries(std::move(ts), std::move(vs), nominal_step);
}

std::map<TimestampS, double> clearsky_table(const std::vector<Record>& records) {
    std::map<TimestampS, double> table;
    for (const auto& rec : records) {
        if (rec.ghi_clr) table.emplace(rec.timestamp, *rec.ghi_clr);
    }
    return table;
}

}  // namespace helioscore
