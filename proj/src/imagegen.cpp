#include "cgfam/imagegen.hpp"

#include "cgfam/common.hpp"
#include "cgfam/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cgfam {

ImageLayout layout_for(std::size_t apis) {
    if (apis == 0) throw std::invalid_argument("layout_for: registry size must be positive");
    const std::size_t features = apis * kCentralityKinds;
    auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(features)));
    while (side * side < features) ++side;
    while (side > 1 && (side - 1) * (side - 1) >= features) --side;
    return {apis, side, side * side - features};
}

std::optional<FeatureLocation> pixel_to_feature(const ImageLayout& layout, std::size_t row, std::size_t col) {
    if (row >= layout.side || col >= layout.side)
        throw std::out_of_range("pixel (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
                                std::to_string(layout.side) + "x" + std::to_string(layout.side) + " image");
    const std::size_t flat = row * layout.side + col;
    if (flat >= layout.features()) return std::nullopt;
    return FeatureLocation{static_cast<std::uint32_t>(flat / kCentralityKinds),
                           static_cast<CentralityKind>(flat % kCentralityKinds)};
}

std::size_t flat_index(const FeatureLocation& f) {
    return static_cast<std::size_t>(f.api) * kCentralityKinds + static_cast<std::size_t>(f.kind);
}

std::uint64_t FeatureImage::digest() const {
    Digest d;
    d.u64(layout.apis).u64(layout.side).u64(registry_hash).u64(source_hash);
    for (double v : pixels) d.f64(v);
    return d.value();
}

FeatureImage to_image(const CentralityProfile& p, const ImageLayout& layout) {
    if (p.rows() != layout.apis)
        throw std::invalid_argument("profile has " + std::to_string(p.rows()) + " rows but layout expects " +
                                    std::to_string(layout.apis));
    FeatureImage img;
    img.layout = layout;
    img.registry_hash = p.registry_hash();
    img.source_hash = p.digest();
    img.pixels.assign(layout.pixels(), 0.0);
    const auto& v = p.values();
    for (std::size_t i = 0; i < v.size(); ++i) img.pixels[i] = 255.0 * v[i];
    return img;
}

FeatureImage featurize(const CallGraph& g, const ApiRegistry& registry, const KatzParams& katz) {
    return to_image(profile(g, registry, katz), layout_for(registry.size()));
}

std::vector<std::uint8_t> quantize(const std::vector<double>& pixels) {
    std::vector<std::uint8_t> out(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        // nearbyint honours the default round-to-nearest-even mode.
        double q = std::nearbyint(std::clamp(pixels[i], 0.0, 255.0));
        out[i] = static_cast<std::uint8_t>(q);
    }
    return out;
}

void export_png(const FeatureImage& img, const std::string& path) {
    write_png_gray(path, img.layout.side, img.layout.side, quantize(img.pixels));
}

namespace {
constexpr char kImageMagic[4] = {'C', 'G', 'F', 'I'};
constexpr std::uint32_t kImageVersion = 1;
}  // namespace

std::string encode_image(const FeatureImage& img) {
    std::ostringstream os;
    BinaryWriter w(os);
    w.raw(kImageMagic, 4);
    w.u32(kImageVersion);
    w.u32(static_cast<std::uint32_t>(img.layout.apis));
    w.u32(static_cast<std::uint32_t>(img.layout.side));
    w.u32(static_cast<std::uint32_t>(img.layout.pad));
    w.u64(img.registry_hash);
    w.u64(img.source_hash);
    for (double v : img.pixels) w.f64(v);
    return os.str();
}

FeatureImage decode_image(std::string_view bytes) {
    std::istringstream is{std::string(bytes)};
    BinaryReader r(is);
    char magic[4];
    r.raw(magic, 4);
    if (!std::equal(magic, magic + 4, kImageMagic)) throw FormatError("not a feature-image cache file");
    if (r.u32() != kImageVersion) throw FormatError("unsupported feature-image cache version");
    FeatureImage img;
    const std::uint32_t apis = r.u32();
    if (apis == 0) throw FormatError("feature-image cache has zero APIs");
    img.layout = layout_for(apis);
    const std::uint32_t side = r.u32();
    const std::uint32_t pad = r.u32();
    if (side != img.layout.side || pad != img.layout.pad) throw FormatError("feature-image layout header is inconsistent");
    img.registry_hash = r.u64();
    img.source_hash = r.u64();
    img.pixels.resize(img.layout.pixels());
    for (double& v : img.pixels) v = r.f64();
    return img;
}

}  // namespace cgfam
