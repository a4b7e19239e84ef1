#include "helioscore/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helioscore {

WarpPath dtw_path(std::span<const double> test_norm, std::span<const double> ref_norm) {
    const std::size_t n = test_norm.size();
    if (n != ref_norm.size()) {
        throw std::invalid_argument("dtw_path: length mismatch");
    }
    if (n < 2) {
        throw std::invalid_argument("dtw_path: need at least two samples");
    }

    std::vector<double> dp(n * n);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return dp[i * n + j]; };

    at(0, 0) = std::abs(test_norm[0] - ref_norm[0]);
    for (std::size_t i = 1; i < n; ++i) {
        at(i, 0) = at(i - 1, 0) + std::abs(test_norm[i] - ref_norm[0]);
    }
    for (std::size_t j = 1; j < n; ++j) {
        at(0, j) = at(0, j - 1) + std::abs(test_norm[0] - ref_norm[j]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            const double best =
                std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
            at(i, j) = best + std::abs(test_norm[i] - ref_norm[j]);
        }
    }

    WarpPath path;
    path.cost = at(n - 1, n - 1);
    std::size_t i = n - 1, j = n - 1;
    path.steps.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1);
            const double up = at(i - 1, j);
            const double left = at(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        path.steps.emplace_back(i, j);
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return path;
}

DistortionReport tdi_tdm(const WarpPath& path) {
    if (path.steps.empty()) {
        throw std::invalid_argument("tdi_tdm: empty path");
    }
    const std::size_t n = path.steps.back().first + 1;
    double late_area = 0.0, adv_area = 0.0;
    for (const auto& [i, j] : path.steps) {
        if (i > j) {
            late_area += static_cast<double>(i - j);
        } else if (j > i) {
            adv_area += static_cast<double>(j - i);
        }
    }
    const double identity_area = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;

    DistortionReport report;
    report.n = n;
    report.tdi_late = 100.0 * late_area / identity_area;
    report.tdi_adv = 100.0 * adv_area / identity_area;
    report.tdi = report.tdi_adv + report.tdi_late;
    report.tdm = (report.tdi == 0.0) ? 0.0 : 2.0 * report.tdi_late / report.tdi - 1.0;
    return report;
}

DistortionReport sequence_distortion(const AlignedPair& pair) {
    if (pair.size() < 2) {
        throw std::invalid_argument("sequence_distortion: need at least two samples");
    }
    const std::vector<double> test_norm = minmax_normalize(pair.test);
    const std::vector<double> ref_norm = minmax_normalize(pair.reference);
    return tdi_tdm(dtw_path(test_norm, ref_norm));
}

DistortionReport aggregate_distortion(std::span<const DistortionReport> reports) {
    if (reports.empty()) {
        throw std::invalid_argument("aggregate_distortion: no reports");
    }
    double weight_total = 0.0;
    double tdi_sum = 0.0, adv_area = 0.0, late_area = 0.0;
    for (const auto& r : reports) {
        const double w = static_cast<double>(r.n) * static_cast<double>(r.n - 1) / 2.0;
        weight_total += w;
        tdi_sum += r.tdi * w;
        adv_area += r.tdi_adv * w;
        late_area += r.tdi_late * w;
    }
    DistortionReport out;
    out.n = reports.front().n;
    out.tdi = tdi_sum / weight_total;
    out.tdi_adv = adv_area / weight_total;
    out.tdi_late = late_area / weight_total;
    const double total = adv_area + late_area;
    out.tdm = (total == 0.0) ? 0.0 : 2.0 * late_area / total - 1.0;
    return out;
}

}  // namespace helioscore
