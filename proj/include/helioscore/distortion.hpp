#pragma once

#include <span>
#include <utility>

#include "helioscore/series.hpp"

namespace helioscore {

/// DTW alignment path. Steps run from (0,0) to (n-1,n-1); each step
/// increments the test index i, the reference index j, or both.
struct WarpPath {
    std::vector<std::pair<std::size_t, std::size_t>> steps;
    double cost = 0.0;  // accumulated |T_i - R_j| over visited cells
};

/// Temporal distortion statistics. tdi/tdi_adv/tdi_late are percentages of
/// the maximal distortion (the area under the identity path, n(n-1)/2);
/// tdm ranges from -1 (in advance) to +1 (late).
struct DistortionReport {
    double tdi = 0.0;
    double tdi_adv = 0.0;
    double tdi_late = 0.0;
    double tdm = 0.0;
    std::size_t n = 0;  // sequence length the areas were normalized by
};

/**
 * Dynamic-programming optimum over steps {(1,0),(0,1),(1,1)} minimizing the
 * accumulated |T_i - R_j|. Inputs must be equal-length (n >= 2) and already
 * min-max normalized. Ties during backtracking are broken deterministically:
 * diagonal first, then the (i-1,j) predecessor, then (i,j-1).
 */
WarpPath dtw_path(std::span<const double> test_norm, std::span<const double> ref_norm);

/// Discrete warp-path area split into late (test index ahead of the matched
/// reference index, i > j) and in-advance (i < j) parts, both normalized by
/// n(n-1)/2. TDM = 2 TDI_late / TDI - 1, defined as 0 when TDI = 0.
DistortionReport tdi_tdm(const WarpPath& path);

/// Normalizes both sides independently, warps, and summarizes.
DistortionReport sequence_distortion(const AlignedPair& pair);

/// Pools several sequence reports: TDI/adv/late are area-weighted means
/// (weight n(n-1)/2) and TDM is recomputed from the pooled areas.
DistortionReport aggregate_distortion(std::span<const DistortionReport> reports);

}  // namespace helioscore
