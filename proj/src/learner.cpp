#include "helioscore/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "helioscore/rng.hpp"
#include "helioscore/solar.hpp"

namespace helioscore {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::ptrdiff_t index_at(const std::vector<Record>& records, TimestampS ts) {
    const auto it = std::lower_bound(
        records.begin(), records.end(), ts,
        [](const Record& r, TimestampS t) { return r.timestamp < t; });
    if (it == records.end() || it->timestamp != ts) return -1;
    return it - records.begin();
}

void push_angle_features(std::vector<double>& out, const Record& rec) {
    const double sza = *rec.sza_deg;
    const double saa = *rec.saa_deg;
    out.push_back(rec.ghi);
    out.push_back(sza);
    out.push_back(std::cos(sza * kDegToRad));
    out.push_back(std::sin(sza * kDegToRad));
    out.push_back(saa);
    out.push_back(std::cos(saa * kDegToRad));
    out.push_back(std::sin(saa * kDegToRad));
}

double sign_or_zero(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

std::pair<std::vector<double>, double> featurize(const std::vector<Record>& records,
                                                 std::size_t anchor, DurationS horizon) {
    if (anchor >= records.size()) {
        throw std::out_of_range("featurize: anchor index out of range");
    }
    if (horizon < 0) {
        throw std::invalid_argument("featurize: horizon must be non-negative");
    }
    const TimestampS anchor_ts = records[anchor].timestamp;

    std::vector<double> features;
    features.reserve(kFeatureCount);
    for (std::size_t k = 0; k < kLagCount; ++k) {
        const TimestampS ts = anchor_ts - static_cast<DurationS>(k) * kLagStep;
        const std::ptrdiff_t idx = index_at(records, ts);
        if (idx < 0) {
            throw std::runtime_error("incomplete window: no record at " +
                                     format_iso8601_utc(ts));
        }
        const Record& rec = records[static_cast<std::size_t>(idx)];
        if (!rec.sza_deg || !rec.saa_deg) {
            throw std::runtime_error("incomplete window: missing solar angles at " +
                                     format_iso8601_utc(ts));
        }
        push_angle_features(features, rec);
    }

    const std::ptrdiff_t target_idx = index_at(records, anchor_ts + horizon);
    if (target_idx < 0) {
        throw std::runtime_error("incomplete window: no target record at " +
                                 format_iso8601_utc(anchor_ts + horizon));
    }
    return {std::move(features), records[static_cast<std::size_t>(target_idx)].ghi};
}

std::vector<LearnerExample> make_examples(const std::vector<Record>& records,
                                          const std::vector<std::size_t>& anchors,
                                          DurationS horizon) {
    std::vector<LearnerExample> examples;
    examples.reserve(anchors.size());
    for (std::size_t anchor : anchors) {
        std::pair<std::vector<double>, double> row;
        try {
            row = featurize(records, anchor, horizon);
        } catch (const std::runtime_error&) {
            continue;  // incomplete window: anchor unusable
        }
        const Record& base = records[anchor];
        const std::ptrdiff_t target_idx =
            index_at(records, base.timestamp + horizon);
        const Record& target = records[static_cast<std::size_t>(target_idx)];
        if (!base.ghi_clr || !target.ghi_clr) continue;

        LearnerExample ex;
        ex.features = std::move(row.first);
        ex.target = row.second;
        ex.spm = clearsky_index(base.ghi, *base.ghi_clr) * *target.ghi_clr;
        ex.anchor = base.timestamp;
        examples.push_back(std::move(ex));
    }
    return examples;
}

FeatureScaler FeatureScaler::fit(const std::vector<LearnerExample>& examples) {
    if (examples.empty()) {
        throw std::invalid_argument("FeatureScaler::fit: no examples");
    }
    const std::size_t n = examples[0].features.size();
    FeatureScaler scaler;
    scaler.mean.assign(n, 0.0);
    scaler.scale.assign(n, 0.0);
    for (const auto& ex : examples) {
        for (std::size_t f = 0; f < n; ++f) scaler.mean[f] += ex.features[f];
    }
    const double inv_n = 1.0 / static_cast<double>(examples.size());
    for (double& m : scaler.mean) m *= inv_n;
    for (const auto& ex : examples) {
        for (std::size_t f = 0; f < n; ++f) {
            const double d = ex.features[f] - scaler.mean[f];
            scaler.scale[f] += d * d;
        }
    }
    for (double& s : scaler.scale) {
        s = std::sqrt(s * inv_n);
        if (s < 1e-12) s = 1.0;
    }
    return scaler;
}

std::vector<double> FeatureScaler::transform(std::span<const double> raw) const {
    if (raw.size() != mean.size()) {
        throw std::invalid_argument("FeatureScaler::transform: feature-count mismatch");
    }
    std::vector<double> out(raw.size());
    for (std::size_t f = 0; f < raw.size(); ++f) {
        out[f] = (raw[f] - mean[f]) / scale[f];
    }
    return out;
}

double Model::predict(std::span<const double> x) const {
    const std::size_t n = shape.n_features;
    if (x.size() != n) {
        throw std::invalid_argument("Model::predict: feature-count mismatch");
    }
    if (shape.hidden == 0) {
        double out = theta[n];
        for (std::size_t f = 0; f < n; ++f) out += theta[f] * x[f];
        return out;
    }
    const std::size_t h = shape.hidden;
    const double* w1 = theta.data();
    const double* b1 = theta.data() + h * n;
    const double* w2 = theta.data() + h * n + h;
    double out = theta[h * n + 2 * h];  // b2
    for (std::size_t j = 0; j < h; ++j) {
        double z = b1[j];
        const double* row = w1 + j * n;
        for (std::size_t f = 0; f < n; ++f) z += row[f] * x[f];
        if (z > 0.0) out += w2[j] * z;
    }
    return out;
}

LossGrad loss_and_grad(const Model& model, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, const TrainConfig& config) {
    if (x.empty() || x.size() != y.size()) {
        throw std::invalid_argument("loss_and_grad: batch empty or size mismatch");
    }
    const std::size_t n = model.shape.n_features;
    const std::size_t h = model.shape.hidden;
    const double inv_m = 1.0 / static_cast<double>(x.size());

    LossGrad out;
    out.grad.assign(model.theta.size(), 0.0);

    double data_loss = 0.0;
    std::vector<double> z(h), a(h);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::vector<double>& xi = x[i];
        double yhat;
        if (h == 0) {
            yhat = model.theta[n];
            for (std::size_t f = 0; f < n; ++f) yhat += model.theta[f] * xi[f];
        } else {
            const double* w1 = model.theta.data();
            const double* b1 = model.theta.data() + h * n;
            const double* w2 = model.theta.data() + h * n + h;
            yhat = model.theta[h * n + 2 * h];
            for (std::size_t j = 0; j < h; ++j) {
                double zj = b1[j];
                const double* row = w1 + j * n;
                for (std::size_t f = 0; f < n; ++f) zj += row[f] * xi[f];
                z[j] = zj;
                a[j] = zj > 0.0 ? zj : 0.0;
                yhat += w2[j] * a[j];
            }
        }

        const double err = yhat - y[i];
        double d;  // d(data loss)/d(yhat), already carrying the 1/m factor
        if (config.loss == LossKind::L2) {
            data_loss += err * err;
            d = 2.0 * err * inv_m;
        } else {
            data_loss += std::abs(err);
            d = sign_or_zero(err) * inv_m;
        }

        if (h == 0) {
            for (std::size_t f = 0; f < n; ++f) out.grad[f] += d * xi[f];
            out.grad[n] += d;
        } else {
            const double* w2 = model.theta.data() + h * n + h;
            double* g_w1 = out.grad.data();
            double* g_b1 = out.grad.data() + h * n;
            double* g_w2 = out.grad.data() + h * n + h;
            out.grad[h * n + 2 * h] += d;
            for (std::size_t j = 0; j < h; ++j) {
                g_w2[j] += d * a[j];
                if (z[j] > 0.0) {  // rectifier derivative, 0 at the kink
                    const double dz = d * w2[j];
                    g_b1[j] += dz;
                    double* g_row = g_w1 + j * n;
                    for (std::size_t f = 0; f < n; ++f) g_row[f] += dz * xi[f];
                }
            }
        }
    }
    out.loss = data_loss * inv_m;

    if (config.weight_decay != 0.0) {
        double penalty = 0.0;
        model.for_each_weight_index([&](std::size_t i) {
            penalty += model.theta[i] * model.theta[i];
            out.grad[i] += config.weight_decay * model.theta[i];
        });
        out.loss += 0.5 * config.weight_decay * penalty;
    }
    return out;
}

void adam_step(Model& model, const std::vector<double>& grad, AdamState& state,
               const TrainConfig& config) {
    if (grad.size() != model.theta.size() || state.m.size() != grad.size()) {
        throw std::invalid_argument("adam_step: size mismatch");
    }
    state.step += 1;
    const double b1t = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double b2t = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / b1t;
        const double v_hat = state.v[i] / b2t;
        model.theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.stabilizer);
    }
}

namespace {

double data_loss_only(const Model& model, const std::vector<std::vector<double>>& x,
                      const std::vector<double>& y, LossKind kind) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double err = model.predict(x[i]) - y[i];
        total += kind == LossKind::L2 ? err * err : std::abs(err);
    }
    return total / static_cast<double>(x.size());
}

double penalty_term(const Model& model, double weight_decay) {
    if (weight_decay == 0.0) return 0.0;
    double penalty = 0.0;
    model.for_each_weight_index(
        [&](std::size_t i) { penalty += model.theta[i] * model.theta[i]; });
    return 0.5 * weight_decay * penalty;
}

Model init_model(ModelShape shape, double y_mean, Rng& rng) {
    Model model;
    model.shape = shape;
    model.theta.assign(shape.param_count(), 0.0);
    const std::size_t n = shape.n_features;
    const std::size_t h = shape.hidden;
    if (h == 0) {
        model.theta[n] = y_mean;
        return model;
    }
    const double r1 = std::sqrt(6.0 / static_cast<double>(n + h));
    for (std::size_t i = 0; i < h * n; ++i) model.theta[i] = rng.next_in(-r1, r1);
    const double r2 = std::sqrt(6.0 / static_cast<double>(h + 1));
    for (std::size_t j = 0; j < h; ++j) model.theta[h * n + h + j] = rng.next_in(-r2, r2);
    model.theta[h * n + 2 * h] = y_mean;
    return model;
}

}  // namespace

TrainResult train(const std::vector<LearnerExample>& train_set,
                  const std::vector<LearnerExample>& validation_set,
                  const TrainConfig& config) {
    if (train_set.empty() || validation_set.empty()) {
        throw std::invalid_argument("train: train and validation sets must be non-empty");
    }
    if (config.learning_rate < 0.0) {
        throw std::invalid_argument("train: learning rate must be non-negative");
    }
    if (config.batch_size == 0) {
        throw std::invalid_argument("train: batch size must be >= 1");
    }
    if (config.epochs == 0) {
        throw std::invalid_argument("train: epoch count must be >= 1");
    }

    TrainResult result;
    result.scaler = FeatureScaler::fit(train_set);

    const auto standardize = [&](const std::vector<LearnerExample>& examples) {
        std::vector<std::vector<double>> x;
        x.reserve(examples.size());
        for (const auto& ex : examples) x.push_back(result.scaler.transform(ex.features));
        return x;
    };
    const std::vector<std::vector<double>> x_train = standardize(train_set);
    const std::vector<std::vector<double>> x_val = standardize(validation_set);
    std::vector<double> y_train(train_set.size()), y_val(validation_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) y_train[i] = train_set[i].target;
    for (std::size_t i = 0; i < validation_set.size(); ++i) y_val[i] = validation_set[i].target;

    const double y_mean =
        std::accumulate(y_train.begin(), y_train.end(), 0.0) /
        static_cast<double>(y_train.size());

    Rng rng(config.seed);
    ModelShape shape{train_set[0].features.size(), config.hidden};
    Model model = init_model(shape, y_mean, rng);
    AdamState opt(model.theta.size());

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta = model.theta;
    std::size_t best_epoch = 0;

    std::vector<std::vector<double>> batch_x;
    std::vector<double> batch_y;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch_x.push_back(x_train[order[i]]);
                batch_y.push_back(y_train[order[i]]);
            }
            const LossGrad lg = loss_and_grad(model, batch_x, batch_y, config);
            adam_step(model, lg.grad, opt, config);
        }

        const double train_loss =
            data_loss_only(model, x_train, y_train, config.loss) +
            penalty_term(model, config.weight_decay);
        const double val_loss = data_loss_only(model, x_val, y_val, config.loss);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw std::runtime_error("train: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        result.history.push_back({epoch, train_loss, val_loss});
        if (val_loss < best_val) {
            best_val = val_loss;
            best_theta = model.theta;
            best_epoch = epoch;
        }
    }

    result.model = Model{shape, std::move(best_theta)};
    result.best_epoch = best_epoch;
    result.best_validation_loss = best_val;
    return result;
}

double model_rmse(const TrainResult& result, const std::vector<LearnerExample>& examples) {
    if (examples.empty()) {
        throw std::invalid_argument("model_rmse: no examples");
    }
    double total = 0.0;
    for (const auto& ex : examples) {
        const double err = result.predict(ex.features) - ex.target;
        total += err * err;
    }
    return std::sqrt(total / static_cast<double>(examples.size()));
}

double spm_rmse(const std::vector<LearnerExample>& examples) {
    if (examples.empty()) {
        throw std::invalid_argument("spm_rmse: no examples");
    }
    double total = 0.0;
    for (const auto& ex : examples) {
        const double err = ex.spm - ex.target;
        total += err * err;
    }
    return std::sqrt(total / static_cast<double>(examples.size()));
}

std::vector<LearningCurvePoint> learning_curve(const std::vector<LearnerExample>& train_set,
                                               const std::vector<LearnerExample>& validation_set,
                                               const std::vector<LearnerExample>& test_set,
                                               const TrainConfig& config,
                                               const std::vector<double>& fractions) {
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0) {
            throw std::invalid_argument("learning_curve: fractions must lie in (0, 1]");
        }
    }
    const double rmse_spm = spm_rmse(test_set);
    if (rmse_spm <= 0.0) {
        throw std::runtime_error("learning_curve: degenerate reference (zero persistence error)");
    }

    // One seeded shuffle defines the nesting; each fraction takes a prefix
    // and restores time order, so fraction 1.0 is exactly a plain train run.
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(config.seed);
    rng.shuffle(order);

    std::vector<LearningCurvePoint> points;
    for (double f : fractions) {
        const auto want = static_cast<std::size_t>(
            std::llround(f * static_cast<double>(train_set.size())));
        const std::size_t n = std::clamp<std::size_t>(want, 1, train_set.size());
        std::vector<std::size_t> subset(order.begin(),
                                        order.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(subset.begin(), subset.end());
        std::vector<LearnerExample> sub_train;
        sub_train.reserve(n);
        for (std::size_t idx : subset) sub_train.push_back(train_set[idx]);

        const TrainResult result = train(sub_train, validation_set, config);
        LearningCurvePoint point;
        point.fraction = f;
        point.n_train = n;
        point.rmse_model = model_rmse(result, test_set);
        point.rmse_spm = rmse_spm;
        point.fs_rmse = 1.0 - point.rmse_model / rmse_spm;
        points.push_back(point);
    }
    return points;
}

std::string checkpoint_to_json(const TrainResult& result, const TrainConfig& config) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["kind"] = "helioscore-model";
    doc["architecture"] = result.model.shape.hidden == 0 ? "linear" : "mlp1";
    doc["n_features"] = result.model.shape.n_features;
    doc["hidden"] = result.model.shape.hidden;
    doc["theta"] = result.model.theta;
    doc["scaler"]["mean"] = result.scaler.mean;
    doc["scaler"]["scale"] = result.scaler.scale;
    auto& tr = doc["training"];
    tr["loss"] = config.loss == LossKind::L2 ? "L2" : "L1";
    tr["learning_rate"] = config.learning_rate;
    tr["weight_decay"] = config.weight_decay;
    tr["batch_size"] = config.batch_size;
    tr["epochs"] = config.epochs;
    tr["seed"] = config.seed;
    tr["horizon_s"] = config.horizon;
    tr["best_epoch"] = result.best_epoch;
    tr["best_validation_loss"] = result.best_validation_loss;
    return doc.dump(2) + "\n";
}

std::pair<Model, FeatureScaler> checkpoint_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("checkpoint: invalid JSON: ") + e.what());
    }
    if (doc.value("schema_version", 0) != 1 || doc.value("kind", "") != "helioscore-model") {
        throw std::runtime_error("checkpoint: unknown schema");
    }
    Model model;
    model.shape.n_features = doc.at("n_features").get<std::size_t>();
    model.shape.hidden = doc.at("hidden").get<std::size_t>();
    model.theta = doc.at("theta").get<std::vector<double>>();
    if (model.theta.size() != model.shape.param_count()) {
        throw std::runtime_error("checkpoint: parameter count does not match shape");
    }
    FeatureScaler scaler;
    scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
    scaler.scale = doc.at("scaler").at("scale").get<std::vector<double>>();
    if (scaler.mean.size() != model.shape.n_features ||
        scaler.scale.size() != model.shape.n_features) {
        throw std::runtime_error("checkpoint: scaler size does not match feature count");
    }
    return {std::move(model), std::move(scaler)};
}

std::string history_csv(const std::vector<EpochStats>& history) {
    std::string out = "epoch,train_loss,validation_loss\n";
    char buf[96];
    for (const auto& row : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", row.epoch, row.train_loss,
                      row.validation_loss);
        out += buf;
    }
    return out;
}

}  // namespace helioscore
