#include "handuse/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "json.hpp"

#include "handuse/error.hpp"

namespace handuse {

namespace {

constexpr std::size_t kH1 = MlpModel::kLayerSizes[1];
constexpr std::size_t kH2 = MlpModel::kLayerSizes[2];
constexpr std::size_t kOut = MlpModel::kLayerSizes[3];

struct Activations {
    std::array<double, kH1> h1;
    std::array<double, kH2> h2;
    std::array<double, kOut> logits;
};

template <std::size_t In, std::size_t Out>
void dense(const DenseLayer& layer, const std::array<double, In>& x, std::array<double, Out>& y) {
    const double* w = layer.weights.data();
    for (std::size_t o = 0; o < Out; ++o) {
        double acc = layer.bias[o];
        const double* row = w + o * In;
        for (std::size_t i = 0; i < In; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

template <std::size_t N>
void relu(std::array<double, N>& v) {
    for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

void run_forward(const MlpModel& model, const FeatureVector& x, Activations& a) {
    const auto& L = model.layers();
    dense(L[0], x, a.h1);
    relu(a.h1);
    dense(L[1], a.h1, a.h2);
    relu(a.h2);
    dense(L[2], a.h2, a.logits);
}

std::array<double, 2> softmax(const std::array<double, 2>& z) {
    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m);
    const double e1 = std::exp(z[1] - m);
    const double s = e0 + e1;
    return {e0 / s, e1 / s};
}

// -log softmax(z)[label], computed without forming the probability.
double neg_log_prob(const std::array<double, 2>& z, std::uint8_t label) {
    const double m = std::max(z[0], z[1]);
    const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
    return lse - z[label];
}

// Adds d(weight * nll)/d(params) for one sample into `grad`, scaled by `scale`.
double accumulate(const MlpModel& model, const LabeledSample& s, double scale, MlpModel& grad) {
    Activations a;
    run_forward(model, s.features, a);
    const auto p = softmax(a.logits);
    const double loss = neg_log_prob(a.logits, s.label);

    const auto& L = model.layers();
    auto& G = grad.layers();

    std::array<double, kOut> d3{p[0] * scale, p[1] * scale};
    d3[s.label] -= scale;

    std::array<double, kH2> d2{};
    for (std::size_t o = 0; o < kOut; ++o) {
        G[2].bias[o] += d3[o];
        double* gw = G[2].weights.data() + o * kH2;
        const double* w = L[2].weights.data() + o * kH2;
        for (std::size_t i = 0; i < kH2; ++i) {
            gw[i] += d3[o] * a.h2[i];
            d2[i] += d3[o] * w[i];
        }
    }
    for (std::size_t i = 0; i < kH2; ++i)
        if (!(a.h2[i] > 0.0)) d2[i] = 0.0;

    std::array<double, kH1> d1{};
    for (std::size_t o = 0; o < kH2; ++o) {
        if (d2[o] == 0.0) continue;
        G[1].bias[o] += d2[o];
        double* gw = G[1].weights.data() + o * kH1;
        const double* w = L[1].weights.data() + o * kH1;
        for (std::size_t i = 0; i < kH1; ++i) {
            gw[i] += d2[o] * a.h1[i];
            d1[i] += d2[o] * w[i];
        }
    }
    for (std::size_t i = 0; i < kH1; ++i)
        if (!(a.h1[i] > 0.0)) d1[i] = 0.0;

    for (std::size_t o = 0; o < kH1; ++o) {
        if (d1[o] == 0.0) continue;
        G[0].bias[o] += d1[o];
        double* gw = G[0].weights.data() + o * kFeatureCount;
        for (std::size_t i = 0; i < kFeatureCount; ++i) gw[i] += d1[o] * s.features[i];
    }
    return loss;
}

double mean_loss(const MlpModel& model, std::span<const LabeledSample> samples, const ClassWeights& w) {
    if (samples.empty()) return 0.0;
    double total = 0;
    Activations a;
    for (const auto& s : samples) {
        run_forward(model, s.features, a);
        total += w[s.label] * neg_log_prob(a.logits, s.label);
    }
    return total / static_cast<double>(samples.size());
}

void sgd_step(MlpModel& model, const MlpModel& grad, double lr) {
    auto& L = model.layers();
    const auto& G = grad.layers();
    for (std::size_t l = 0; l < MlpModel::kLayerCount; ++l) {
        for (std::size_t i = 0; i < L[l].weights.size(); ++i) L[l].weights[i] -= lr * G[l].weights[i];
        for (std::size_t i = 0; i < L[l].bias.size(); ++i) L[l].bias[i] -= lr * G[l].bias[i];
    }
}

void zero(MlpModel& m) {
    for (auto& l : m.layers()) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
}

}  // namespace

FeatureVector featurize(const DetectionRecord& r) {
    return {r.bbox.x1, r.bbox.y1, r.bbox.x2, r.bbox.y2, r.confidence,
            static_cast<double>(r.contact_state) / 4.0, r.offset.dx, r.offset.dy, r.offset.magnitude};
}

MlpModel::MlpModel() {
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        auto& layer = layers_[l];
        layer.inputs = kLayerSizes[l];
        layer.outputs = kLayerSizes[l + 1];
        layer.weights.assign(layer.inputs * layer.outputs, 0.0);
        layer.bias.assign(layer.outputs, 0.0);
    }
}

MlpModel MlpModel::initialized(std::uint64_t seed) {
    MlpModel m;
    m.seed_ = seed;
    std::mt19937_64 rng(seed);
    for (auto& layer : m.layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& w : layer.weights) w = dist(rng);
    }
    return m;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
}

std::vector<double> MlpModel::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers_) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void MlpModel::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count())
        throw ArgumentError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                            std::to_string(flat.size()));
    auto it = flat.begin();
    for (auto& l : layers_) {
        std::copy_n(it, l.weights.size(), l.weights.begin());
        it += static_cast<std::ptrdiff_t>(l.weights.size());
        std::copy_n(it, l.bias.size(), l.bias.begin());
        it += static_cast<std::ptrdiff_t>(l.bias.size());
    }
}

bool MlpModel::all_finite() const {
    for (const auto& l : layers_) {
        for (double w : l.weights)
            if (!std::isfinite(w)) return false;
        for (double b : l.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

std::array<double, 2> forward(const MlpModel& model, const FeatureVector& features) {
    if (!model.all_finite()) throw NumericError("model has non-finite parameters");
    for (double f : features)
        if (!std::isfinite(f)) throw NumericError("non-finite input feature");
    Activations a;
    run_forward(model, features, a);
    return softmax(a.logits);
}

ClassWeights inverse_frequency_weights(std::span<const LabeledSample> samples) {
    std::size_t pos = 0;
    for (const auto& s : samples) pos += s.label;
    const std::size_t neg = samples.size() - pos;
    const double n = static_cast<double>(samples.size());
    ClassWeights w;
    if (neg > 0) w.no_interaction = n / (2.0 * static_cast<double>(neg));
    if (pos > 0) w.interaction = n / (2.0 * static_cast<double>(pos));
    if (pos == 0 || neg == 0) w = ClassWeights{};
    return w;
}

LossGradient loss_and_gradient(const MlpModel& model, std::span<const LabeledSample> batch,
                               const ClassWeights& weights) {
    if (batch.empty()) throw ArgumentError("loss_and_gradient needs a non-empty batch");
    LossGradient out;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double total = 0;
    for (const auto& s : batch) {
        const double w = weights[s.label];
        total += w * accumulate(model, s, w * inv_n, out.gradient);
    }
    out.loss = total * inv_n;
    return out;
}

TrainResult train_model(std::span<const LabeledSample> samples, const TrainConfig& cfg) {
    if (samples.empty()) throw ArgumentError("no training samples");
    if (!(cfg.learning_rate > 0) || cfg.batch_size == 0 || cfg.max_epochs == 0 || cfg.patience == 0)
        throw ConfigError("training configuration values must be positive");
    if (!(cfg.validation_fraction >= 0 && cfg.validation_fraction < 1))
        throw ConfigError("validation_fraction must lie in [0,1)");

    TrainResult result;
    std::mt19937_64 rng(cfg.seed);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(samples.size())));
    if (n_val >= samples.size()) n_val = 0;

    std::vector<LabeledSample> train_set, val_set;
    train_set.reserve(samples.size() - n_val);
    val_set.reserve(n_val);
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < samples.size() - n_val ? train_set : val_set).push_back(samples[order[i]]);

    const auto weights = inverse_frequency_weights(train_set);
    {
        std::size_t pos = 0;
        for (const auto& s : train_set) pos += s.label;
        if (pos == 0 || pos == train_set.size())
            result.warnings.push_back("training set contains a single class (" +
                                      std::string(pos == 0 ? "no interaction" : "interaction") + ")");
    }
    // With no hold-out, early stopping watches the training loss.
    std::span<const LabeledSample> monitor = val_set.empty() ? std::span<const LabeledSample>(train_set)
                                                             : std::span<const LabeledSample>(val_set);

    MlpModel model = MlpModel::initialized(cfg.seed);
    MlpModel grad;
    MlpModel best = model;
    double best_loss = mean_loss(model, monitor, weights);
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(train_set.begin(), train_set.end(), rng);
        for (std::size_t start = 0; start < train_set.size(); start += cfg.batch_size) {
            const auto len = std::min(cfg.batch_size, train_set.size() - start);
            std::span<const LabeledSample> batch(train_set.data() + start, len);
            zero(grad);
            const double inv_n = 1.0 / static_cast<double>(len);
            for (const auto& s : batch) accumulate(model, s, weights[s.label] * inv_n, grad);
            sgd_step(model, grad, cfg.learning_rate);
        }
        if (!model.all_finite()) throw NumericError("training diverged at epoch " + std::to_string(epoch));
        result.training_loss.push_back(mean_loss(model, train_set, weights));
        result.epochs_run = epoch;

        const double loss = mean_loss(model, monitor, weights);
        if (loss < best_loss) {
            best_loss = loss;
            best = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    result.model = std::move(best);
    result.model.set_seed(cfg.seed);
    result.best_validation_loss = best_loss;
    return result;
}

std::vector<FoldModel> train(std::span<const LabeledSample> samples, const LosoSplit& split, const TrainConfig& cfg) {
    std::vector<FoldModel> out;
    out.reserve(split.folds.size());
    for (const auto& fold : split.folds) {
        for (const auto& id : fold.training)
            if (id == fold.held_out)
                throw SplitIntegrityError("fold for '" + fold.held_out + "' lists the held-out participant in training");
        std::unordered_set<std::string> members(fold.training.begin(), fold.training.end());
        std::vector<LabeledSample> subset;
        std::vector<std::string> ids;
        for (const auto& s : samples) {
            if (members.count(s.participant_id)) {
                subset.push_back(s);
                ids.push_back(s.participant_id);
            }
        }
        if (auto check = verify_fold_data(fold, ids); !check) throw SplitIntegrityError(check.reason);
        out.push_back({fold, train_model(subset, cfg)});
    }
    return out;
}

SessionProfiles predict_session(const MlpModel& model, std::span<const DetectionRecord> records,
                                const SessionManifest& manifest, bool pooled, const PoolingConfig& cfg) {
    if (!model.all_finite()) throw NumericError("model has non-finite parameters");
    SessionProfiles out;
    for (auto side : {HandSide::Left, HandSide::Right}) {
        auto& p = side == HandSide::Left ? out.left : out.right;
        p = {manifest.participant_id, manifest.session_id, side, manifest.fps,
             std::vector<std::uint8_t>(static_cast<std::size_t>(manifest.frame_count), 0)};
    }
    Activations a;
    for (const auto& r : records) {
        if (r.frame_index < 0 || r.frame_index >= manifest.frame_count)
            throw RangeError("frame_index " + std::to_string(r.frame_index) + " outside session of " +
                             std::to_string(manifest.frame_count) + " frames");
        const auto x = featurize(r);
        for (double f : x)
            if (!std::isfinite(f)) throw NumericError("non-finite input feature");
        run_forward(model, x, a);
        const auto prob = softmax(a.logits);
        auto& p = r.hand_side == HandSide::Left ? out.left : out.right;
        p.bits[static_cast<std::size_t>(r.frame_index)] = prob[1] > prob[0] ? 1 : 0;
    }
    if (pooled) {
        pool_majority_in_place(out.left.bits, cfg);
        pool_majority_in_place(out.right.bits, cfg);
    }
    return out;
}

std::string serialize_model(const MlpModel& model, const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["format"] = "handuse-mlp";
    j["version"] = 1;
    j["layer_sizes"] = MlpModel::kLayerSizes;
    j["hidden_activation"] = "relu";
    j["output"] = "softmax";
    j["seed"] = model.seed();
    j["train_config"] = {{"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size},
                         {"max_epochs", cfg.max_epochs},       {"patience", cfg.patience},
                         {"validation_fraction", cfg.validation_fraction}, {"seed", cfg.seed}};
    auto layers = nlohmann::ordered_json::array();
    for (const auto& l : model.layers())
        layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
    j["layers"] = std::move(layers);
    return j.dump(1) + "\n";
}

MlpModel parse_model(std::string_view body, TrainConfig* cfg) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("model checkpoint: ") + e.what());
    }
    try {
        if (j.at("format") != "handuse-mlp") throw ValidationError("format", "not a handuse-mlp checkpoint");
        if (j.at("version") != 1) throw ValidationError("version", "unsupported checkpoint version");
        if (j.at("layer_sizes").get<std::vector<std::size_t>>() !=
            std::vector<std::size_t>(MlpModel::kLayerSizes.begin(), MlpModel::kLayerSizes.end()))
            throw ValidationError("layer_sizes", "expected [9,32,16,2]");
        MlpModel m;
        m.set_seed(j.at("seed").get<std::uint64_t>());
        const auto& layers = j.at("layers");
        if (!layers.is_array() || layers.size() != MlpModel::kLayerCount)
            throw ValidationError("layers", "expected 3 layers");
        for (std::size_t l = 0; l < MlpModel::kLayerCount; ++l) {
            auto& dst = m.layers()[l];
            const auto& src = layers[l];
            if (src.at("inputs").get<std::size_t>() != dst.inputs || src.at("outputs").get<std::size_t>() != dst.outputs)
                throw ValidationError("layers", "layer " + std::to_string(l) + " has wrong dimensions");
            auto w = src.at("weights").get<std::vector<double>>();
            auto b = src.at("bias").get<std::vector<double>>();
            if (w.size() != dst.weights.size() || b.size() != dst.bias.size())
                throw ValidationError("layers", "layer " + std::to_string(l) + " has wrong parameter count");
            dst.weights = std::move(w);
            dst.bias = std::move(b);
        }
        if (!m.all_finite()) throw ValidationError("layers", "non-finite parameter");
        if (cfg) {
            const auto& c = j.at("train_config");
            cfg->learning_rate = c.at("learning_rate").get<double>();
            cfg->batch_size = c.at("batch_size").get<std::size_t>();
            cfg->max_epochs = c.at("max_epochs").get<std::size_t>();
            cfg->patience = c.at("patience").get<std::size_t>();
            cfg->validation_fraction = c.at("validation_fraction").get<double>();
            cfg->seed = c.at("seed").get<std::uint64_t>();
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("checkpoint", e.what());
    }
}

}  // namespace handuse
