#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "helioscore/learner.hpp"
#include "helioscore/rng.hpp"
#include "helioscore/timeutil.hpp"
#include "oracles.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using helioscore::AdamState;
using helioscore::FeatureScaler;
using helioscore::LearnerExample;
using helioscore::LossGrad;
using helioscore::LossKind;
using helioscore::Model;
using helioscore::ModelShape;
using helioscore::Record;
using helioscore::Rng;
using helioscore::TimestampS;
using helioscore::TrainConfig;
using helioscore::TrainResult;

namespace {

Record make_rec(TimestampS ts, double ghi, std::optional<double> sza = 60.0,
                std::optional<double> saa = 30.0, std::optional<double> clr = 800.0) {
    Record rec;
    rec.timestamp = ts;
    rec.ghi = ghi;
    rec.sza_deg = sza;
    rec.saa_deg = saa;
    rec.ghi_clr = clr;
    return rec;
}

// Ten records at 2-min cadence, ghi = 100 + i, constant angles.
std::vector<Record> lag_window_records() {
    std::vector<Record> records;
    for (int i = 0; i < 10; ++i) records.push_back(make_rec(120 * i, 100.0 + i));
    return records;
}

// Noiseless linear-generative fixture: raw features with assorted scales,
// target = w*.x + b*, so a linear model can interpolate exactly.
struct LinearFixture {
    std::vector<LearnerExample> train, validation, test;
    std::vector<double> w_true;
    double b_true = 50.0;
};

LinearFixture make_linear_fixture(std::size_t dim, std::size_t n_train,
                                  std::size_t n_val, std::size_t n_test,
                                  std::uint64_t seed) {
    LinearFixture fx;
    Rng rng(seed);
    std::vector<double> scales(dim), offsets(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        scales[j] = rng.next_in(0.5, 20.0);
        offsets[j] = rng.next_in(-50.0, 50.0);
        fx.w_true.push_back(rng.next_in(-3.0, 3.0));
    }
    auto draw = [&](std::size_t count, TimestampS t0) {
        std::vector<LearnerExample> out;
        for (std::size_t i = 0; i < count; ++i) {
            LearnerExample ex;
            ex.anchor = t0 + static_cast<TimestampS>(120 * i);
            double y = fx.b_true;
            for (std::size_t j = 0; j < dim; ++j) {
                const double raw = offsets[j] + scales[j] * rng.next_gaussian();
                ex.features.push_back(raw);
                y += fx.w_true[j] * raw;
            }
            ex.target = y;
            ex.spm = y + 25.0;  // a deliberately poor reference forecast
            out.push_back(std::move(ex));
        }
        return out;
    };
    fx.train = draw(n_train, 0);
    fx.validation = draw(n_val, 1'000'000);
    fx.test = draw(n_test, 2'000'000);
    return fx;
}

}  // namespace

TEST_CASE("featurize lays out lag-major feature blocks", "[learner]") {
    const auto records = lag_window_records();
    const auto [features, target] = helioscore::featurize(records, 4, 600);

    REQUIRE(features.size() == helioscore::kFeatureCount);
    REQUIRE(target == 109.0);  // ghi five steps after the anchor

    // GHI leads each 7-wide block; lags run 0, 2, 4, 6, 8 minutes back.
    REQUIRE(features[0] == 104.0);
    REQUIRE(features[7] == 103.0);
    REQUIRE(features[14] == 102.0);
    REQUIRE(features[21] == 101.0);
    REQUIRE(features[28] == 100.0);

    // Angle block: SZA 60, SAA 30 in degrees plus their trig pairs.
    REQUIRE(features[1] == 60.0);
    REQUIRE(features[2] == Approx(0.5));
    REQUIRE(features[3] == Approx(std::sqrt(3.0) / 2.0));
    REQUIRE(features[4] == 30.0);
    REQUIRE(features[5] == Approx(std::sqrt(3.0) / 2.0));
    REQUIRE(features[6] == Approx(0.5));
}

TEST_CASE("featurize trig features satisfy the unit-circle identity", "[learner]") {
    Rng rng(3);
    std::vector<Record> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(
            make_rec(120 * i, 200.0, rng.next_in(0.0, 89.0), rng.next_in(0.0, 359.0)));
    }
    const auto [features, target] = helioscore::featurize(records, 4, 600);
    (void)target;
    for (std::size_t lag = 0; lag < helioscore::kLagCount; ++lag) {
        const std::size_t base = lag * helioscore::kFeaturesPerLag;
        const double sza_sq = features[base + 2] * features[base + 2] +
                              features[base + 3] * features[base + 3];
        const double saa_sq = features[base + 5] * features[base + 5] +
                              features[base + 6] * features[base + 6];
        REQUIRE(sza_sq == Approx(1.0).epsilon(1e-12));
        REQUIRE(saa_sq == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("featurize rejects incomplete windows", "[learner]") {
    auto records = lag_window_records();
    records.erase(records.begin() + 2);  // hole at anchor - 4 min
    REQUIRE_THROWS_WITH(helioscore::featurize(records, 3, 600),
                        ContainsSubstring("incomplete window"));

    records = lag_window_records();
    records[1].sza_deg = std::nullopt;
    REQUIRE_THROWS_WITH(helioscore::featurize(records, 4, 600),
                        ContainsSubstring("missing solar angles"));

    records = lag_window_records();
    REQUIRE_THROWS_WITH(helioscore::featurize(records, 4, 1200),
                        ContainsSubstring("no target record"));

    REQUIRE_THROWS_AS(helioscore::featurize(records, 99, 600), std::out_of_range);
}

TEST_CASE("featurize repeats identical blocks for constant inputs", "[learner]") {
    std::vector<Record> records;
    for (int i = 0; i < 10; ++i) records.push_back(make_rec(120 * i, 321.0));
    const auto [features, target] = helioscore::featurize(records, 4, 600);
    REQUIRE(target == 321.0);
    for (std::size_t lag = 1; lag < helioscore::kLagCount; ++lag) {
        for (std::size_t f = 0; f < helioscore::kFeaturesPerLag; ++f) {
            REQUIRE(features[lag * helioscore::kFeaturesPerLag + f] == features[f]);
        }
    }
}

TEST_CASE("make_examples skips unusable anchors and fills the SPM column", "[learner]") {
    auto records = lag_window_records();
    records[9].ghi_clr = 900.0;  // target clear sky differs from the base's 800

    std::vector<std::size_t> anchors(records.size());
    std::iota(anchors.begin(), anchors.end(), 0);
    const auto examples = helioscore::make_examples(records, anchors, 600);

    // Anchors 0-3 lack lags; anchors 5-9 lack targets. Only index 4 works.
    REQUIRE(examples.size() == 1);
    REQUIRE(examples[0].anchor == records[4].timestamp);
    REQUIRE(examples[0].target == 109.0);
    // SPM: k_c(anchor) * clr(target) = (104/800) * 900.
    REQUIRE(examples[0].spm == Approx(104.0 / 800.0 * 900.0));
}

TEST_CASE("FeatureScaler standardizes per feature", "[learner]") {
    std::vector<LearnerExample> examples(3);
    examples[0].features = {1.0, 7.0};
    examples[1].features = {3.0, 7.0};
    examples[2].features = {5.0, 7.0};

    const auto scaler = FeatureScaler::fit(examples);
    REQUIRE(scaler.mean[0] == Approx(3.0));
    REQUIRE(scaler.mean[1] == Approx(7.0));
    REQUIRE(scaler.scale[1] == 1.0);  // constant feature passes through centered

    const auto t0 = scaler.transform(examples[0].features);
    const auto t2 = scaler.transform(examples[2].features);
    REQUIRE(t0[0] == Approx(-t2[0]));
    REQUIRE(t0[1] == 0.0);
    REQUIRE(t2[1] == 0.0);

    REQUIRE_THROWS_AS(FeatureScaler::fit({}), std::invalid_argument);
    REQUIRE_THROWS_AS(scaler.transform(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("Model::predict evaluates the rectified hidden layer", "[learner]") {
    Model model;
    model.shape = ModelShape{2, 2};
    // W1 rows (1,2) and (3,4); b1 (0.5, -10); w2 (2, 5); b2 1.
    model.theta = {1.0, 2.0, 3.0, 4.0, 0.5, -10.0, 2.0, 5.0, 1.0};
    const std::vector<double> x{1.0, 1.0};
    // z = (3.5, -3) -> relu (3.5, 0) -> 2*3.5 + 5*0 + 1.
    REQUIRE(model.predict(x) == 8.0);

    Model linear;
    linear.shape = ModelShape{2, 0};
    linear.theta = {2.0, -1.0, 10.0};
    REQUIRE(linear.predict(x) == 11.0);
    REQUIRE_THROWS_AS(linear.predict(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("loss_and_grad is zero for perfect predictions without decay", "[learner]") {
    Model model;
    model.shape = ModelShape{3, 0};
    model.theta = {1.5, -2.0, 0.25, 4.0};
    std::vector<std::vector<double>> x{{1.0, 2.0, 3.0}, {-1.0, 0.5, 2.0}};
    std::vector<double> y;
    for (const auto& row : x) y.push_back(model.predict(row));

    TrainConfig config;
    config.weight_decay = 0.0;
    for (LossKind kind : {LossKind::L2, LossKind::L1}) {
        config.loss = kind;
        const LossGrad lg = helioscore::loss_and_grad(model, x, y, config);
        REQUIRE(lg.loss == 0.0);
        for (double g : lg.grad) REQUIRE(g == 0.0);
    }
}

TEST_CASE("loss_and_grad reduces to the quadratic penalty on zero error", "[learner]") {
    Model model;
    model.shape = ModelShape{2, 0};
    model.theta = {3.0, -4.0, 2.0};
    std::vector<std::vector<double>> x{{1.0, 0.5}};
    std::vector<double> y{model.predict(x[0])};

    TrainConfig config;
    config.loss = LossKind::L2;
    config.weight_decay = 0.1;
    const LossGrad lg = helioscore::loss_and_grad(model, x, y, config);
    REQUIRE(lg.loss == Approx(0.5 * 0.1 * (9.0 + 16.0)));
    REQUIRE(lg.grad[0] == Approx(0.1 * 3.0));
    REQUIRE(lg.grad[1] == Approx(0.1 * -4.0));
    REQUIRE(lg.grad[2] == 0.0);  // bias is exempt from decay

    REQUIRE_THROWS_AS(helioscore::loss_and_grad(model, {}, {}, config),
                      std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences", "[learner]") {
    Rng rng(777);
    int checked = 0;
    while (checked < 100) {
        const bool hidden = (checked % 2) == 1;
        const std::size_t dim = 3 + rng.next_below(4);
        const std::size_t width = hidden ? 2 + rng.next_below(3) : 0;
        ModelShape shape{dim, width};

        Model model;
        model.shape = shape;
        model.theta.resize(shape.param_count());
        for (auto& t : model.theta) t = rng.next_in(-1.5, 1.5);

        const std::size_t batch = 2 + rng.next_below(7);
        std::vector<std::vector<double>> x(batch, std::vector<double>(dim));
        for (auto& row : x) {
            for (auto& v : row) v = rng.next_in(-2.0, 2.0);
        }

        // Keep the rectifier pre-activations away from their kink so the
        // finite-difference probe never crosses it.
        if (hidden) {
            bool safe = true;
            for (const auto& row : x) {
                for (std::size_t j = 0; j < width && safe; ++j) {
                    double z = model.theta[width * dim + j];
                    for (std::size_t f = 0; f < dim; ++f) {
                        z += model.theta[j * dim + f] * row[f];
                    }
                    safe = std::abs(z) > 1e-3;
                }
                if (!safe) break;
            }
            if (!safe) continue;  // redraw
        }

        TrainConfig config;
        config.loss = (checked % 4 < 2) ? LossKind::L2 : LossKind::L1;
        config.weight_decay = (checked % 3 == 0) ? 0.0 : rng.next_in(0.0, 0.05);

        // For L1, park every residual well away from the |.| kink.
        std::vector<double> y(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const double sign = rng.next_below(2) == 0 ? 1.0 : -1.0;
            y[i] = model.predict(x[i]) + sign * rng.next_in(0.5, 3.0);
        }

        const LossGrad lg = helioscore::loss_and_grad(model, x, y, config);
        const auto fd = oracles::finite_difference(
            [&](const std::vector<double>& theta) {
                Model probe;
                probe.shape = shape;
                probe.theta = theta;
                return helioscore::loss_and_grad(probe, x, y, config).loss;
            },
            model.theta);

        double num = 0.0, denom = 0.0;
        for (std::size_t i = 0; i < fd.size(); ++i) {
            num += (fd[i] - lg.grad[i]) * (fd[i] - lg.grad[i]);
            denom += fd[i] * fd[i];
        }
        const double rel = std::sqrt(num) / std::max(1.0, std::sqrt(denom));
        INFO("draw " << checked << " dim=" << dim << " width=" << width);
        REQUIRE(rel < 1e-6);
        ++checked;
    }
}

TEST_CASE("adam first step moves by about lr in the gradient direction", "[learner]") {
    Model model;
    model.shape = ModelShape{2, 0};
    model.theta = {1.0, 1.0, 1.0};
    AdamState state(3);
    TrainConfig config;
    config.learning_rate = 0.001;

    helioscore::adam_step(model, {0.5, -2.0, 0.0}, state, config);
    REQUIRE(model.theta[0] == Approx(1.0 - 0.001).epsilon(1e-6));
    REQUIRE(model.theta[1] == Approx(1.0 + 0.001).epsilon(1e-6));
    REQUIRE(model.theta[2] == 1.0);  // zero gradient leaves the bias untouched
    REQUIRE(state.step == 1);
}

TEST_CASE("adam with zero gradients never moves", "[learner]") {
    Model model;
    model.shape = ModelShape{2, 0};
    model.theta = {0.25, -0.5, 3.0};
    const auto original = model.theta;
    AdamState state(3);
    TrainConfig config;
    for (int i = 0; i < 10; ++i) {
        helioscore::adam_step(model, {0.0, 0.0, 0.0}, state, config);
    }
    REQUIRE(model.theta == original);
}

TEST_CASE("adam trajectories are bit-identical across runs", "[learner]") {
    Rng rng(909);
    Model a, b;
    a.shape = b.shape = ModelShape{4, 0};
    a.theta.resize(5);
    for (auto& t : a.theta) t = rng.next_in(-1.0, 1.0);
    b.theta = a.theta;
    AdamState sa(5), sb(5);
    TrainConfig config;
    config.learning_rate = 0.01;

    for (int step = 0; step < 50; ++step) {
        std::vector<double> grad(5);
        for (auto& g : grad) g = rng.next_in(-2.0, 2.0);
        helioscore::adam_step(a, grad, sa, config);
        helioscore::adam_step(b, grad, sb, config);
    }
    REQUIRE(a.theta == b.theta);
    REQUIRE(sa.m == sb.m);
    REQUIRE(sa.v == sb.v);
}

TEST_CASE("training interpolates the noiseless linear fixture", "[learner]") {
    const auto fx = make_linear_fixture(35, 200, 50, 50, 4242);
    TrainConfig config;
    config.loss = LossKind::L2;
    config.weight_decay = 0.0;
    config.learning_rate = 0.05;
    config.batch_size = 10;
    config.epochs = 200;
    config.seed = 1;

    const TrainResult result = helioscore::train(fx.train, fx.validation, config);
    REQUIRE(result.history.size() == 200);
    REQUIRE(helioscore::model_rmse(result, fx.train) < 1.0);
    REQUIRE(helioscore::model_rmse(result, fx.test) < 1.0);

    // The converged parameters must agree with the closed-form least-squares
    // solution on the standardized design matrix.
    std::vector<std::vector<double>> x_std;
    std::vector<double> y;
    for (const auto& ex : fx.train) {
        x_std.push_back(result.scaler.transform(ex.features));
        y.push_back(ex.target);
    }
    const auto exact = oracles::least_squares(x_std, y);
    REQUIRE(exact.size() == result.model.theta.size());
    double num = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        num += (exact[i] - result.model.theta[i]) * (exact[i] - result.model.theta[i]);
        denom += exact[i] * exact[i];
    }
    REQUIRE(std::sqrt(num) / std::sqrt(denom) < 0.01);
}

TEST_CASE("a zero learning rate freezes the history", "[learner]") {
    const auto fx = make_linear_fixture(6, 40, 10, 10, 5);
    TrainConfig config;
    config.learning_rate = 0.0;
    config.epochs = 5;

    const TrainResult result = helioscore::train(fx.train, fx.validation, config);
    REQUIRE(result.history.size() == 5);
    for (const auto& epoch : result.history) {
        REQUIRE(epoch.train_loss == result.history[0].train_loss);
        REQUIRE(epoch.validation_loss == result.history[0].validation_loss);
    }
}

TEST_CASE("training is deterministic given the seed", "[learner]") {
    const auto fx = make_linear_fixture(8, 60, 20, 10, 6);
    TrainConfig config;
    config.hidden = 4;
    config.learning_rate = 0.01;
    config.epochs = 20;
    config.seed = 33;

    const TrainResult a = helioscore::train(fx.train, fx.validation, config);
    const TrainResult b = helioscore::train(fx.train, fx.validation, config);
    REQUIRE(a.model.theta == b.model.theta);
    REQUIRE(a.best_epoch == b.best_epoch);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        REQUIRE(a.history[i].train_loss == b.history[i].train_loss);
        REQUIRE(a.history[i].validation_loss == b.history[i].validation_loss);
    }

    // The hidden model should at least improve on its random start.
    REQUIRE(a.best_validation_loss <= a.history.front().validation_loss);
}

TEST_CASE("training reports the epoch when the loss diverges", "[learner]") {
    const auto fx = make_linear_fixture(6, 40, 10, 10, 7);
    TrainConfig config;
    config.learning_rate = 1e200;
    config.epochs = 3;
    REQUIRE_THROWS_WITH(helioscore::train(fx.train, fx.validation, config),
                        ContainsSubstring("non-finite loss at epoch 1"));
}

TEST_CASE("train validates its configuration", "[learner]") {
    const auto fx = make_linear_fixture(4, 10, 5, 5, 8);
    TrainConfig config;
    REQUIRE_THROWS_AS(helioscore::train({}, fx.validation, config), std::invalid_argument);
    REQUIRE_THROWS_AS(helioscore::train(fx.train, {}, config), std::invalid_argument);
    config.learning_rate = -1.0;
    REQUIRE_THROWS_AS(helioscore::train(fx.train, fx.validation, config),
                      std::invalid_argument);
    config.learning_rate = 0.1;
    config.batch_size = 0;
    REQUIRE_THROWS_AS(helioscore::train(fx.train, fx.validation, config),
                      std::invalid_argument);
    config.batch_size = 10;
    config.epochs = 0;
    REQUIRE_THROWS_AS(helioscore::train(fx.train, fx.validation, config),
                      std::invalid_argument);
}

TEST_CASE("learning_curve at fraction 1.0 reproduces a plain run", "[learner]") {
    const auto fx = make_linear_fixture(10, 80, 20, 30, 9);
    TrainConfig config;
    config.learning_rate = 0.05;
    config.epochs = 40;
    config.seed = 11;

    const auto points =
        helioscore::learning_curve(fx.train, fx.validation, fx.test, config, {0.25, 1.0});
    REQUIRE(points.size() == 2);
    REQUIRE(points[0].n_train == 20);
    REQUIRE(points[1].n_train == 80);

    const TrainResult plain = helioscore::train(fx.train, fx.validation, config);
    REQUIRE(points[1].rmse_model == helioscore::model_rmse(plain, fx.test));
    REQUIRE(points[1].rmse_spm == helioscore::spm_rmse(fx.test));
    REQUIRE(points[1].fs_rmse ==
            Approx(1.0 - points[1].rmse_model / points[1].rmse_spm).epsilon(1e-12));

    REQUIRE_THROWS_AS(
        helioscore::learning_curve(fx.train, fx.validation, fx.test, config, {0.0}),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        helioscore::learning_curve(fx.train, fx.validation, fx.test, config, {1.5}),
        std::invalid_argument);
}

TEST_CASE("checkpoints round-trip through JSON", "[learner]") {
    const auto fx = make_linear_fixture(5, 30, 10, 5, 12);
    TrainConfig config;
    config.hidden = 3;
    config.learning_rate = 0.02;
    config.epochs = 10;

    const TrainResult result = helioscore::train(fx.train, fx.validation, config);
    const std::string json = helioscore::checkpoint_to_json(result, config);
    const auto [model, scaler] = helioscore::checkpoint_from_json(json);

    REQUIRE(model.shape.n_features == result.model.shape.n_features);
    REQUIRE(model.shape.hidden == result.model.shape.hidden);
    REQUIRE(model.theta == result.model.theta);
    REQUIRE(scaler.mean == result.scaler.mean);
    REQUIRE(scaler.scale == result.scaler.scale);
    REQUIRE(model.predict(scaler.transform(fx.test[0].features)) ==
            result.predict(fx.test[0].features));

    REQUIRE_THROWS_WITH(helioscore::checkpoint_from_json("{]"),
                        ContainsSubstring("invalid JSON"));
    REQUIRE_THROWS_WITH(helioscore::checkpoint_from_json("{\"kind\":\"other\"}"),
                        ContainsSubstring("unknown schema"));
}

TEST_CASE("history renders as CSV", "[learner]") {
    std::vector<helioscore::EpochStats> history{{1, 2.5, 3.5}, {2, 1.25, 2.0}};
    const std::string csv = helioscore::history_csv(history);
    REQUIRE_THAT(csv, ContainsSubstring("epoch,train_loss,validation_loss"));
    REQUIRE_THAT(csv, ContainsSubstring("1,2.5,3.5"));
    REQUIRE_THAT(csv, ContainsSubstring("2,1.25,2"));
}
