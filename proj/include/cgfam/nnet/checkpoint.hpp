#pragma once

#include "cgfam/nnet/encoder.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam::nn {

/// One fully connected layer over the normalised embedding: scores = W u + b.
struct LinearHead {
    std::size_t classes = 0;
    std::size_t dim = 0;
    std::vector<float> weight;  // classes x dim
    std::vector<float> bias;    // classes

    LinearHead() = default;
    LinearHead(std::size_t classes, std::size_t dim) : classes(classes), dim(dim), weight(classes * dim), bias(classes) {}
    std::vector<float> scores(std::span<const float> unit_embedding) const;
};

struct Checkpoint {
    Encoder<float> encoder;
    std::uint64_t registry_hash = 0;
    std::vector<std::string> labels;  // empty for encoder-only checkpoints
    std::uint64_t seed = 0;
    std::optional<LinearHead> head;

    Checkpoint(EncoderConfig config, std::uint64_t seed, std::uint64_t registry_hash)
        : encoder(std::move(config), seed), registry_hash(registry_hash), seed(seed) {}
    explicit Checkpoint(Encoder<float> enc, std::uint64_t registry_hash)
        : encoder(std::move(enc)), registry_hash(registry_hash), seed(encoder.seed()) {}
};

/// "CGFC" file: version, encoder config, config digest, registry hash, seed,
/// labels, named parameter and buffer tensors, optional head, payload digest.
std::string encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(std::string_view bytes, std::optional<std::uint64_t> expected_registry = std::nullopt);

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_registry = std::nullopt);

}  // namespace cgfam::nn
