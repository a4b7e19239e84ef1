#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "helioscore/rng.hpp"
#include "helioscore/series.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using helioscore::AlignedPair;
using helioscore::ForecastSeries;
using helioscore::Rng;
using helioscore::TimeSeries;
using helioscore::TimestampS;

namespace {

TimeSeries make_series(std::vector<TimestampS> ts, std::vector<double> vs,
                       helioscore::DurationS step = 120) {
    return TimeSeries(std::move(ts), std::move(vs), step);
}

}  // namespace

TEST_CASE("TimeSeries enforces its invariants", "[series]") {
    REQUIRE_NOTHROW(make_series({0, 120, 240}, {1.0, 2.0, 3.0}));
    REQUIRE_NOTHROW(make_series({}, {}));  // empty series is a valid degenerate

    REQUIRE_THROWS_AS(make_series({0, 120}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_series({0, 120, 120}, {1.0, 2.0, 3.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_series({0, 240, 120}, {1.0, 2.0, 3.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_series({0}, {std::numeric_limits<double>::quiet_NaN()}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_series({0}, {std::numeric_limits<double>::infinity()}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_series({0}, {1.0}, 0), std::invalid_argument);
}

TEST_CASE("ForecastSeries horizon must be a non-negative step multiple", "[series]") {
    auto inner = make_series({0, 120, 240}, {1.0, 2.0, 3.0});
    REQUIRE_NOTHROW(ForecastSeries(inner, 240, "p"));
    REQUIRE_NOTHROW(ForecastSeries(inner, 0, "p"));  // zero horizon = identity forecast
    REQUIRE_THROWS_AS(ForecastSeries(inner, 60, "p"), std::invalid_argument);
    REQUIRE_THROWS_AS(ForecastSeries(inner, -120, "p"), std::invalid_argument);
}

TEST_CASE("align intersects the two grids in order", "[series]") {
    const TimestampS t1 = 1000, t2 = 1120, t3 = 1240, t4 = 1360;
    auto test = make_series({t1, t2, t3}, {10.0, 20.0, 30.0});
    auto ref = make_series({t2, t3, t4}, {2.0, 3.0, 4.0});

    const AlignedPair pair = helioscore::align(test, ref);
    REQUIRE(pair.timestamps == std::vector<TimestampS>{t2, t3});
    REQUIRE(pair.test == std::vector<double>{20.0, 30.0});
    REQUIRE(pair.reference == std::vector<double>{2.0, 3.0});
}

TEST_CASE("align on identical grids copies both arrays unchanged", "[series]") {
    auto test = make_series({0, 120, 240}, {5.0, 6.0, 7.0});
    auto ref = make_series({0, 120, 240}, {1.0, 2.0, 3.0});

    const AlignedPair pair = helioscore::align(test, ref);
    REQUIRE(pair.timestamps == test.timestamps());
    REQUIRE(pair.test == test.values());
    REQUIRE(pair.reference == ref.values());
}

TEST_CASE("align rejects disjoint grids", "[series]") {
    auto test = make_series({0, 120}, {1.0, 2.0});
    auto ref = make_series({60, 180}, {1.0, 2.0});
    REQUIRE_THROWS_WITH(helioscore::align(test, ref), ContainsSubstring("no overlap"));
}

TEST_CASE("align is idempotent", "[series]") {
    auto test = make_series({0, 120, 240, 480}, {1.0, 2.0, 3.0, 4.0});
    auto ref = make_series({120, 240, 360, 480}, {9.0, 8.0, 7.0, 6.0});

    const AlignedPair once = helioscore::align(test, ref);
    const AlignedPair twice = helioscore::align(
        make_series(once.timestamps, once.test),
        make_series(once.timestamps, once.reference));
    REQUIRE(twice.timestamps == once.timestamps);
    REQUIRE(twice.test == once.test);
    REQUIRE(twice.reference == once.reference);
}

TEST_CASE("minmax_normalize maps to [0,1]", "[series]") {
    const std::vector<double> a{2.0, 4.0, 6.0};
    REQUIRE(helioscore::minmax_normalize(a) == std::vector<double>{0.0, 0.5, 1.0});

    const std::vector<double> constant{5.0, 5.0, 5.0};
    REQUIRE(helioscore::minmax_normalize(constant) == std::vector<double>{0.0, 0.0, 0.0});

    const std::vector<double> mixed{-1.0, 0.0, 3.0};
    REQUIRE(helioscore::minmax_normalize(mixed) == std::vector<double>{0.0, 0.25, 1.0});

    REQUIRE_THROWS_AS(helioscore::minmax_normalize(std::vector<double>{}),
                      std::invalid_argument);
}

TEST_CASE("minmax_normalize is bounded and order-preserving", "[series]") {
    Rng rng(41);
    std::vector<double> values(257);
    for (auto& v : values) v = rng.next_in(-300.0, 900.0);

    const auto out = helioscore::minmax_normalize(values);
    REQUIRE(out.size() == values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        REQUIRE(out[i] >= 0.0);
        REQUIRE(out[i] <= 1.0);
        for (std::size_t j = i + 1; j < out.size(); j += 17) {
            if (values[i] <= values[j]) {
                REQUIRE(out[i] <= out[j]);
            } else {
                REQUIRE(out[i] >= out[j]);
            }
        }
    }
}

TEST_CASE("split_contiguous cuts at gaps larger than max_gap", "[series]") {
    // Inter-sample steps 120, 120, 600, 120 s with max_gap 240 s.
    auto series = make_series({0, 120, 240, 840, 960}, {1.0, 2.0, 3.0, 4.0, 5.0});
    const auto segments = helioscore::split_contiguous(series, 240);

    REQUIRE(segments.size() == 2);
    REQUIRE(segments[0].size() == 3);
    REQUIRE(segments[1].size() == 2);
    REQUIRE(segments[1].timestamps().front() == 840);
}

TEST_CASE("split_contiguous keeps a uniform series whole", "[series]") {
    auto series = make_series({0, 120, 240, 360}, {1.0, 2.0, 3.0, 4.0});
    const auto segments = helioscore::split_contiguous(series, 120);
    REQUIRE(segments.size() == 1);
    REQUIRE(segments[0].timestamps() == series.timestamps());
    REQUIRE(segments[0].values() == series.values());
}

TEST_CASE("split_contiguous handles a single point", "[series]") {
    auto series = make_series({1000}, {7.0});
    const auto segments = helioscore::split_contiguous(series, 120);
    REQUIRE(segments.size() == 1);
    REQUIRE(segments[0].size() == 1);
    REQUIRE(segments[0].values()[0] == 7.0);
}

TEST_CASE("split_contiguous partitions the series without loss", "[series]") {
    Rng rng(99);
    std::vector<TimestampS> ts;
    std::vector<double> vs;
    TimestampS t = 0;
    for (int i = 0; i < 200; ++i) {
        ts.push_back(t);
        vs.push_back(rng.next_in(0.0, 100.0));
        t += (rng.next_below(10) == 0) ? 1000 : 120;
    }
    auto series = make_series(ts, vs);

    const auto segments = helioscore::split_contiguous(series, 240);
    std::vector<TimestampS> glued_ts;
    std::vector<double> glued_vs;
    for (const auto& seg : segments) {
        glued_ts.insert(glued_ts.end(), seg.timestamps().begin(), seg.timestamps().end());
        glued_vs.insert(glued_vs.end(), seg.values().begin(), seg.values().end());
        for (std::size_t i = 1; i < seg.timestamps().size(); ++i) {
            REQUIRE(seg.timestamps()[i] - seg.timestamps()[i - 1] <= 240);
        }
    }
    REQUIRE(glued_ts == ts);
    REQUIRE(glued_vs == vs);
}
