#pragma once

#include "cgfam/centrality.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam {

/// Square packing of S*4 centralities. The four values of API i sit at flat
/// indices 4i..4i+3 (row-major, rows of length `side`); trailing pixels are
/// zero padding.
struct ImageLayout {
    std::size_t apis = 0;
    std::size_t side = 0;
    std::size_t pad = 0;

    std::size_t pixels() const noexcept { return side * side; }
    std::size_t features() const noexcept { return apis * kCentralityKinds; }
    bool operator==(const ImageLayout&) const = default;
};

ImageLayout layout_for(std::size_t apis);

struct FeatureLocation {
    std::uint32_t api = 0;
    CentralityKind kind = CentralityKind::degree;
    bool operator==(const FeatureLocation&) const = default;
};

/// Inverse of the placement; nullopt for padding. Throws on out-of-range coordinates.
std::optional<FeatureLocation> pixel_to_feature(const ImageLayout& layout, std::size_t row, std::size_t col);
std::size_t flat_index(const FeatureLocation& f);

/// Grayscale image with pixel = 255 * centrality, values in [0,255].
struct FeatureImage {
    ImageLayout layout;
    std::vector<double> pixels;  // side*side, row-major
    std::uint64_t registry_hash = 0;
    std::uint64_t source_hash = 0;  // digest of the originating profile

    double at(std::size_t row, std::size_t col) const { return pixels.at(row * layout.side + col); }
    std::uint64_t digest() const;
    bool operator==(const FeatureImage&) const = default;
};

FeatureImage to_image(const CentralityProfile& p, const ImageLayout& layout);

/// Graph -> profile -> image in one step.
FeatureImage featurize(const CallGraph& g, const ApiRegistry& registry, const KatzParams& katz = {});

/// Round-half-to-even quantization to 8 bits, clamped to [0,255].
std::vector<std::uint8_t> quantize(const std::vector<double>& pixels);
void export_png(const FeatureImage& img, const std::string& path);

/// Binary cache: "CGFI", version, S, side, pad, registry hash, source hash,
/// then side*side little-endian doubles.
std::string encode_image(const FeatureImage& img);
FeatureImage decode_image(std::string_view bytes);

}  // namespace cgfam
