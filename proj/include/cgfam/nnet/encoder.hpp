#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cgfam::nn {

struct StageConfig {
    std::size_t blocks = 2;
    std::size_t channels = 16;
    std::size_t stride = 1;  // applied by the first block of the stage
    bool operator==(const StageConfig&) const = default;
};

/// Residual encoder: 3x3 stem conv + BN + ReLU, residual stages, global
/// average pool, affine map to the embedding, batch norm on the embedding.
struct EncoderConfig {
    std::size_t input_side = 16;
    std::size_t stem_channels = 16;
    std::vector<StageConfig> stages{{2, 16, 1}, {2, 32, 2}, {2, 64, 2}};
    std::size_t embed_dim = 512;
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;

    static EncoderConfig standard(std::size_t side);
    /// 2-channel stem, one block per stage, 8-d embedding; for gradient checks.
    static EncoderConfig tiny(std::size_t side);

    std::size_t block_count() const;
    std::size_t feature_channels() const { return stages.empty() ? stem_channels : stages.back().channels; }
    std::size_t feature_side() const;
    std::uint64_t digest() const;
    bool operator==(const EncoderConfig&) const = default;
};

enum class Mode { train, eval };

/// Activations are stored channel-major: [C][B][H][W].
template <typename T>
struct Activation {
    std::size_t channels = 0, batch = 0, height = 0, width = 0;
    std::vector<T> data;

    std::size_t plane() const noexcept { return height * width; }
    std::size_t per_channel() const noexcept { return batch * height * width; }
};

template <typename T>
struct Param {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<T> value;
};

template <typename T>
struct BatchNormCache {
    std::vector<T> xhat;
    std::vector<T> inv_std;  // per channel
};

template <typename T>
struct BlockCache {
    Activation<T> input;
    BatchNormCache<T> bn1, bn2, shortcut_bn;
    Activation<T> h1;   // post-ReLU of the first conv
    Activation<T> out;  // post-ReLU block output
};

/// Everything backward needs, plus the final convolutional feature maps.
template <typename T>
struct ForwardCache {
    const void* owner = nullptr;
    std::uint64_t version = 0;
    Mode mode = Mode::eval;
    std::size_t batch = 0;

    Activation<T> input;
    BatchNormCache<T> stem_bn;
    Activation<T> stem_out;
    std::vector<BlockCache<T>> blocks;
    std::vector<T> pooled;   // B x C
    BatchNormCache<T> head_bn;
    std::vector<T> embeddings;  // B x D, batch-normalised

    const Activation<T>& features() const { return blocks.empty() ? stem_out : blocks.back().out; }
};

template <typename T>
struct Gradients {
    std::vector<std::vector<T>> params;  // aligned with Encoder::params()
    std::vector<T> input;                // B x side x side
    Activation<T> features;              // d(loss)/d(final feature maps)
};

template <typename T>
class Encoder {
public:
    Encoder(EncoderConfig config, std::uint64_t seed);

    const EncoderConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// input: B x side x side, row-major, values in [0,1].
    ForwardCache<T> forward(std::span<const T> input, std::size_t batch, Mode mode);
    /// Eval-mode forward; never touches encoder state.
    ForwardCache<T> forward_eval(std::span<const T> input, std::size_t batch) const;

    /// Reverse-mode pass for d(loss)/d(embeddings), B x D.
    Gradients<T> backward(const ForwardCache<T>& cache, std::span<const T> grad_embeddings) const;

    const std::vector<Param<T>>& params() const noexcept { return params_; }
    /// Mutable access invalidates caches from earlier forward calls.
    std::vector<Param<T>>& mutable_params() noexcept {
        ++version_;
        return params_;
    }
    const std::vector<Param<T>>& buffers() const noexcept { return buffers_; }
    std::vector<Param<T>>& mutable_buffers() noexcept { return buffers_; }

    std::size_t parameter_count() const;

private:
    struct ConvSpec {
        std::size_t in = 0, out = 0, kernel = 3, stride = 1, pad = 1;
        std::size_t weight = 0;  // index into params_
    };
    struct BnSpec {
        std::size_t channels = 0;
        std::size_t gamma = 0, beta = 0;         // params_
        std::size_t run_mean = 0, run_var = 0;   // buffers_
    };
    struct BlockSpec {
        ConvSpec conv1, conv2, shortcut;
        BnSpec bn1, bn2, shortcut_bn;
        bool projection = false;
    };

    ConvSpec add_conv(const std::string& name, std::size_t in, std::size_t out, std::size_t kernel,
                      std::size_t stride, std::uint64_t seed);
    BnSpec add_bn(const std::string& name, std::size_t channels);
    ForwardCache<T> run(std::span<const T> input, std::size_t batch, Mode mode,
                        std::vector<Param<T>>* running_stats) const;

    EncoderConfig config_;
    std::uint64_t seed_ = 0;
    std::uint64_t version_ = 0;
    std::vector<Param<T>> params_;
    std::vector<Param<T>> buffers_;
    ConvSpec stem_;
    BnSpec stem_bn_;
    std::vector<BlockSpec> blocks_;
    std::size_t fc_weight_ = 0, fc_bias_ = 0;
    BnSpec head_bn_;
};

/// Row-wise unit normalisation; zero rows stay zero.
template <typename T>
std::vector<T> normalize_embeddings(std::span<const T> e, std::size_t rows, std::size_t dim);

/// Chain rule through normalize_embeddings.
template <typename T>
std::vector<T> normalize_backward(std::span<const T> e, std::span<const T> grad_normalized, std::size_t rows,
                                  std::size_t dim);

}  // namespace cgfam::nn
