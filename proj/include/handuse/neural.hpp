#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handuse/classify.hpp"
#include "handuse/ingest.hpp"
#include "handuse/loso.hpp"

namespace handuse {

inline constexpr std::size_t kFeatureCount = 9;

/// (x1, y1, x2, y2, confidence, contact_state / 4, dx, dy, magnitude)
using FeatureVector = std::array<double, kFeatureCount>;

FeatureVector featurize(const DetectionRecord& record);

/// Fully connected layer; weights are outputs x inputs, row-major.
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    bool operator==(const DenseLayer&) const = default;
};

/// 9 -> 32 -> 16 -> 2 perceptron with rectified hidden units and a softmax output.
/// The same type doubles as the container for gradients.
class MlpModel {
public:
    static constexpr std::array<std::size_t, 4> kLayerSizes{kFeatureCount, 32, 16, 2};
    static constexpr std::size_t kLayerCount = kLayerSizes.size() - 1;

    /// All parameters zero.
    MlpModel();
    /// Uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static MlpModel initialized(std::uint64_t seed);

    std::array<DenseLayer, kLayerCount>& layers() { return layers_; }
    const std::array<DenseLayer, kLayerCount>& layers() const { return layers_; }

    std::uint64_t seed() const { return seed_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    std::size_t parameter_count() const;
    /// Layer by layer: weights (row-major) then bias.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    bool all_finite() const;

    bool operator==(const MlpModel&) const = default;

private:
    std::array<DenseLayer, kLayerCount> layers_;
    std::uint64_t seed_ = 0;
};

/// (p_no_interaction, p_interaction). Throws NumericError on non-finite parameters or input.
std::array<double, 2> forward(const MlpModel& model, const FeatureVector& features);

struct LabeledSample {
    std::string participant_id;
    FeatureVector features{};
    std::uint8_t label = 0;
};

struct ClassWeights {
    double no_interaction = 1.0;
    double interaction = 1.0;
    double operator[](std::uint8_t label) const { return label ? interaction : no_interaction; }
};

/// Inverse class frequency, n / (2 n_c). A class absent from `samples` gets weight 1.
ClassWeights inverse_frequency_weights(std::span<const LabeledSample> samples);

struct LossGradient {
    double loss = 0;
    MlpModel gradient;
};

/// Class-weighted cross-entropy averaged over the batch size, with its gradient.
LossGradient loss_and_gradient(const MlpModel& model, std::span<const LabeledSample> batch,
                               const ClassWeights& weights);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct TrainResult {
    MlpModel model;
    double best_validation_loss = 0;
    std::size_t best_epoch = 0;  // 1-based; 0 means the initial parameters were never beaten
    std::size_t epochs_run = 0;
    /// Full training-set loss after each epoch.
    std::vector<double> training_loss;
    std::vector<std::string> warnings;
};

/// Mini-batch gradient descent with early stopping on a seeded validation hold-out.
/// Returns the parameters with the lowest validation loss.
TrainResult train_model(std::span<const LabeledSample> samples, const TrainConfig& cfg);

struct FoldModel {
    LosoFold fold;
    TrainResult result;
};

/// Trains one model per fold on the samples of that fold's training participants.
/// Throws SplitIntegrityError if a fold would train on its held-out participant.
std::vector<FoldModel> train(std::span<const LabeledSample> samples, const LosoSplit& split, const TrainConfig& cfg);

/// Per-frame argmax over detected hands (ties and absent frames score 0), then optional pooling.
SessionProfiles predict_session(const MlpModel& model, std::span<const DetectionRecord> records,
                                const SessionManifest& manifest, bool pooled, const PoolingConfig& cfg);

/// Versioned JSON checkpoint; loading validates the layer dimensions.
std::string serialize_model(const MlpModel& model, const TrainConfig& cfg);
MlpModel parse_model(std::string_view text, TrainConfig* cfg = nullptr);

}  // namespace handuse
