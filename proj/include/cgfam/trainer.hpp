#pragma once

#include "cgfam/augment.hpp"
#include "cgfam/dataset.hpp"
#include "cgfam/metrics.hpp"
#include "cgfam/nnet/checkpoint.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cgfam {

struct SupConConfig {
    double temperature = 0.07;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::size_t batch_size = 64;
    std::size_t epochs = 100;
    std::uint64_t seed = 1;

    void check() const;
    std::uint64_t digest() const;
};

struct TrainLog {
    std::vector<double> epoch_loss;  // mean per-step objective
    std::string csv() const;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// SGD with heavy-ball momentum and coupled weight decay:
///   g += wd*p;  v = m*v + g;  p -= lr*v.
class Sgd {
public:
    Sgd(double lr, double momentum, double weight_decay) : lr_(lr), momentum_(momentum), wd_(weight_decay) {}
    /// `slot` identifies the tensor across steps.
    void step(std::size_t slot, std::vector<float>& param, std::span<const float> grad);

private:
    double lr_, momentum_, wd_;
    std::vector<std::vector<float>> velocity_;
};

/// Pixel values 0..255 -> encoder input 0..1, for `count` images.
std::vector<float> to_input(std::span<const double> pixels);

/// Eval-mode, unit-normalised embeddings (count x D), chunked over `jobs` threads.
std::vector<float> embed(const nn::Encoder<float>& enc, std::span<const float> input, std::size_t count,
                         std::size_t jobs = 1);

/// Contrastive pre-training on two-view batches. The per-step objective is the
/// summed loss divided by the number of contributing anchors.
nn::Checkpoint train_encoder(const LabeledDataset& ds, const SupConConfig& cfg, const AugmentationPolicy& policy,
                             const nn::EncoderConfig& enc, TrainLog* log = nullptr,
                             const ApiRegistry* registry = nullptr, const EpochCallback& on_epoch = {});

/// Softmax cross-entropy training of a linear head on fixed unit embeddings
/// (rows x dim).
nn::LinearHead train_head(std::span<const float> unit, std::size_t dim, std::span<const std::uint32_t> labels,
                          std::size_t classes, const SupConConfig& cfg, TrainLog* log = nullptr);

/// Linear head on frozen, normalised embeddings with softmax cross-entropy.
nn::Checkpoint train_classifier(nn::Checkpoint encoder, const LabeledDataset& ds, const SupConConfig& cfg,
                                TrainLog* log = nullptr, std::size_t jobs = 1);

/// Ablation: encoder and head trained together with cross-entropy only, on
/// unaugmented single views.
nn::Checkpoint train_joint(const LabeledDataset& ds, const SupConConfig& cfg, const nn::EncoderConfig& enc,
                           TrainLog* log = nullptr, const EpochCallback& on_epoch = {});

struct Prediction {
    std::uint32_t label = 0;
    std::vector<float> scores;
};

/// Index of the largest score; ties go to the lowest index.
std::uint32_t argmax(std::span<const float> scores);

Prediction classify(const nn::Checkpoint& ck, const FeatureImage& img);
std::vector<Prediction> classify_many(const nn::Checkpoint& ck, const std::vector<const FeatureImage*>& images,
                                      std::size_t jobs = 1);

/// Dataset labels are matched to checkpoint labels by name.
Metrics evaluate(const nn::Checkpoint& ck, const LabeledDataset& ds, std::size_t jobs = 1);

}  // namespace cgfam
