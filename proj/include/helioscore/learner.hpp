#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "helioscore/dataset.hpp"
#include "helioscore/timeutil.hpp"

namespace helioscore {

/// Tabular baseline forecaster: auxiliary features (irradiance + solar
/// angles at five 2-minute lags) regressed onto future GHI with a linear
/// model or a single rectified hidden layer, trained by ADAM on an L1 or
/// L2 objective with quadratic weight decay.

inline constexpr std::size_t kLagCount = 5;
inline constexpr DurationS kLagStep = 120;  // seconds between lags
inline constexpr std::size_t kFeaturesPerLag = 7;
inline constexpr std::size_t kFeatureCount = kLagCount * kFeaturesPerLag;

enum class LossKind { L1, L2 };

struct TrainConfig {
    LossKind loss = LossKind::L2;
    double weight_decay = 1e-5;
    double learning_rate = 1e-4;
    std::size_t batch_size = 10;
    std::size_t epochs = 100;
    std::size_t hidden = 0;  // 0 = linear model
    double beta1 = 0.9;
    double beta2 = 0.999;
    double stabilizer = 1e-8;
    std::uint64_t seed = 0;
    DurationS horizon = 600;
};

/**
 * Builds the 35-entry feature vector anchored at records[anchor]:
 * {GHI, SZA, cos SZA, sin SZA, SAA, cos SAA, sin SAA} per lag, lag 0
 * first, then 2, 4, 6, 8 minutes back. The five lag records must exist at
 * exactly 2-minute spacing with solar angles present, and the target
 * record at anchor time + horizon must exist; otherwise throws
 * std::runtime_error("incomplete window: ...").
 * Returns (features, target GHI).
 */
std::pair<std::vector<double>, double> featurize(const std::vector<Record>& records,
                                                 std::size_t anchor, DurationS horizon);

/// One usable training/evaluation row: raw (unscaled) features, the
/// observed target, and the smart-persistence prediction for the same
/// target (from the ghi_clr column) for skill comparisons.
struct LearnerExample {
    std::vector<double> features;
    double target = 0.0;
    double spm = 0.0;
    TimestampS anchor = 0;
};

/// Builds examples for the given anchor indices, silently skipping anchors
/// whose lag window, target, solar angles, or clear-sky values are
/// missing. Returned examples keep the anchors' time order.
std::vector<LearnerExample> make_examples(const std::vector<Record>& records,
                                          const std::vector<std::size_t>& anchors,
                                          DurationS horizon);

/// Per-feature standardization fitted on the training set. Features with
/// (near-)zero spread get scale 1 so they pass through centered.
struct FeatureScaler {
    std::vector<double> mean;
    std::vector<double> scale;

    static FeatureScaler fit(const std::vector<LearnerExample>& examples);
    std::vector<double> transform(std::span<const double> raw) const;
};

struct ModelShape {
    std::size_t n_features = kFeatureCount;
    std::size_t hidden = 0;

    std::size_t param_count() const {
        return hidden == 0 ? n_features + 1
                           : hidden * n_features + 2 * hidden + 1;
    }
};

/// Flat parameter vector. Linear: [w(n), b]. One hidden layer of width H:
/// [W1 row-major (H x n), b1(H), w2(H), b2].
struct Model {
    ModelShape shape;
    std::vector<double> theta;

    double predict(std::span<const double> x) const;
    /// Invokes fn(index) for every weight entry (biases excluded), the
    /// set the quadratic penalty applies to.
    template <typename Fn>
    void for_each_weight_index(Fn&& fn) const {
        const std::size_t n = shape.n_features;
        const std::size_t h = shape.hidden;
        const std::size_t w_end = h == 0 ? n : h * n;
        for (std::size_t i = 0; i < w_end; ++i) fn(i);
        if (h > 0) {
            for (std::size_t i = h * n + h; i < h * n + 2 * h; ++i) fn(i);
        }
    }
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/**
 * Objective over one batch of standardized features: mean absolute or
 * mean squared error per config.loss, plus 0.5 * weight_decay * sum of
 * squared weights (biases exempt). Gradients are exact for L2; for L1 the
 * subgradient uses sign(0) = 0, and the rectifier derivative is 0 at 0.
 */
LossGrad loss_and_grad(const Model& model, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, const TrainConfig& config);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// Standard bias-corrected ADAM update, in place.
void adam_step(Model& model, const std::vector<double>& grad, AdamState& state,
               const TrainConfig& config);

struct EpochStats {
    std::size_t epoch = 0;       // 1-based
    double train_loss = 0.0;      // data term + penalty over the full train set
    double validation_loss = 0.0; // data term only
};

struct TrainResult {
    Model model;  // operates on standardized features
    FeatureScaler scaler;
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_validation_loss = 0.0;

    double predict(std::span<const double> raw_features) const {
        return model.predict(scaler.transform(raw_features));
    }
};

/**
 * Full training loop: fits the scaler on the train split, initializes the
 * model (output bias at the train-target mean, seeded uniform hidden
 * weights), then runs ADAM over seeded per-epoch shuffles. Returns the
 * parameters with the lowest validation loss. Throws std::runtime_error
 * naming the epoch if the loss turns non-finite, std::invalid_argument on
 * empty splits or a negative learning rate.
 */
TrainResult train(const std::vector<LearnerExample>& train_set,
                  const std::vector<LearnerExample>& validation_set,
                  const TrainConfig& config);

/// Root-mean-square error of the trained model over examples.
double model_rmse(const TrainResult& result, const std::vector<LearnerExample>& examples);

/// Root-mean-square error of the embedded smart-persistence predictions.
double spm_rmse(const std::vector<LearnerExample>& examples);

struct LearningCurvePoint {
    double fraction = 0.0;
    std::size_t n_train = 0;
    double rmse_model = 0.0;
    double rmse_spm = 0.0;
    double fs_rmse = 0.0;  // 1 - rmse_model / rmse_spm
};

/**
 * Trains on nested subsets of the training set (prefixes of one seeded
 * shuffle, restored to time order) and reports RMSE forecast skill versus
 * smart persistence on the fixed test set. fraction 1.0 reproduces a
 * plain train run exactly. Fractions must lie in (0, 1].
 */
std::vector<LearningCurvePoint> learning_curve(const std::vector<LearnerExample>& train_set,
                                               const std::vector<LearnerExample>& validation_set,
                                               const std::vector<LearnerExample>& test_set,
                                               const TrainConfig& config,
                                               const std::vector<double>& fractions);

/// Versioned JSON checkpoint (architecture, parameters, scaler, training
/// metadata) and its inverse.
std::string checkpoint_to_json(const TrainResult& result, const TrainConfig& config);
std::pair<Model, FeatureScaler> checkpoint_from_json(const std::string& text);

/// Per-epoch history as CSV (epoch,train_loss,validation_loss).
std::string history_csv(const std::vector<EpochStats>& history);

}  // namespace helioscore
