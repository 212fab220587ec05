#include "cgfam/explain.hpp"

#include "cgfam/common.hpp"
#include "cgfam/png_io.hpp"
#include "cgfam/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace cgfam {

std::vector<double> gradcam_pp_map(const std::vector<double>& A, const std::vector<double>& G, std::size_t channels,
                                   std::size_t h, std::size_t w) {
    const std::size_t plane = h * w;
    std::vector<double> map(plane, 0.0);
    for (std::size_t k = 0; k < channels; ++k) {
        const double* a = A.data() + k * plane;
        const double* g = G.data() + k * plane;
        double sum_a = 0.0;
        for (std::size_t i = 0; i < plane; ++i) sum_a += a[i];
        double weight = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
            const double g2 = g[i] * g[i];
            const double denom = 2.0 * g2 + sum_a * g2 * g[i];
            const double alpha = denom != 0.0 ? g2 / denom : 0.0;
            weight += alpha * std::max(g[i], 0.0);
        }
        for (std::size_t i = 0; i < plane; ++i) map[i] += weight * a[i];
    }
    for (auto& v : map) v = std::max(v, 0.0);
    return map;
}

std::vector<double> upsample_bilinear(const std::vector<double>& src, std::size_t h, std::size_t w, std::size_t out_h,
                                      std::size_t out_w) {
    std::vector<double> out(out_h * out_w);
    auto axis = [](std::size_t o, std::size_t in, std::size_t out, std::size_t& i0, std::size_t& i1, double& t) {
        double x = (static_cast<double>(o) + 0.5) * static_cast<double>(in) / static_cast<double>(out) - 0.5;
        x = std::max(x, 0.0);
        i0 = std::min(static_cast<std::size_t>(x), in - 1);
        i1 = std::min(i0 + 1, in - 1);
        t = x - static_cast<double>(i0);
    };
    for (std::size_t r = 0; r < out_h; ++r) {
        std::size_t r0, r1;
        double tr;
        axis(r, h, out_h, r0, r1, tr);
        for (std::size_t c = 0; c < out_w; ++c) {
            std::size_t c0, c1;
            double tc;
            axis(c, w, out_w, c0, c1, tc);
            const double top = (1 - tc) * src[r0 * w + c0] + tc * src[r0 * w + c1];
            const double bottom = (1 - tc) * src[r1 * w + c0] + tc * src[r1 * w + c1];
            out[r * out_w + c] = (1 - tr) * top + tr * bottom;
        }
    }
    return out;
}

void minmax_normalize(std::vector<double>& v) {
    if (v.empty()) return;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    if (b == a) {
        std::fill(v.begin(), v.end(), a == 0.0 ? 0.0 : 1.0);
        return;
    }
    for (auto& x : v) x = (x - a) / (b - a);
}

Heatmap gradcam_pp(const nn::Checkpoint& ck, const FeatureImage& img, std::uint32_t target) {
    if (!ck.head) throw UsageError("checkpoint has no classifier head; run train-classifier first");
    if (target >= ck.head->classes)
        throw UsageError("target class " + std::to_string(target) + " is not in the checkpoint's " +
                         std::to_string(ck.head->classes) + " labels");
    if (img.registry_hash != ck.registry_hash)
        throw HashMismatchError("image registry " + hex64(img.registry_hash) + " differs from checkpoint registry " +
                                hex64(ck.registry_hash));
    const auto& cfg = ck.encoder.config();
    if (img.layout.side != cfg.input_side)
        throw FormatError("image side " + std::to_string(img.layout.side) + " does not match the encoder input side " +
                          std::to_string(cfg.input_side));

    const auto input = to_input(img.pixels);
    const auto cache = ck.encoder.forward_eval(input, 1);
    const std::size_t D = cfg.embed_dim;
    std::span<const float> w(ck.head->weight.data() + target * D, D);
    const auto ge = nn::normalize_backward<float>(cache.embeddings, w, 1, D);
    const auto grads = ck.encoder.backward(cache, ge);

    const auto& A = cache.features();
    const std::vector<double> a(A.data.begin(), A.data.end());
    const std::vector<double> g(grads.features.data.begin(), grads.features.data.end());
    const auto coarse = gradcam_pp_map(a, g, A.channels, A.height, A.width);

    Heatmap h;
    h.side = img.layout.side;
    h.grid = upsample_bilinear(coarse, A.height, A.width, h.side, h.side);
    minmax_normalize(h.grid);
    h.target = target;
    h.source_digest = img.digest();
    return h;
}

std::vector<AttributionEntry> attribute(const Heatmap& h, const ImageLayout& layout, int top_k) {
    if (top_k <= 0) throw UsageError("top_k must be positive");
    if (h.side != layout.side) throw FormatError("heatmap side does not match the image layout");
    std::vector<AttributionEntry> all;
    for (std::size_t r = 0; r < h.side; ++r) {
        for (std::size_t c = 0; c < h.side; ++c) {
            const double v = h.at(r, c);
            if (!(v > 0.0)) continue;
            if (auto f = pixel_to_feature(layout, r, c)) all.push_back({*f, r * h.side + c, v});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        return x.weight != y.weight ? x.weight > y.weight : x.flat < y.flat;
    });
    if (all.size() > static_cast<std::size_t>(top_k)) all.resize(static_cast<std::size_t>(top_k));
    return all;
}

namespace {

// Piecewise-linear blue -> cyan -> yellow -> red.
std::array<std::uint8_t, 3> colormap(double t) {
    static constexpr double stops[4][3] = {{0, 0, 160}, {0, 200, 255}, {255, 230, 0}, {220, 0, 0}};
    t = std::clamp(t, 0.0, 1.0) * 3.0;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), 2);
    const double f = t - static_cast<double>(i);
    std::array<std::uint8_t, 3> out{};
    for (int k = 0; k < 3; ++k)
        out[k] = static_cast<std::uint8_t>(std::lround((1 - f) * stops[i][k] + f * stops[i + 1][k]));
    return out;
}

}  // namespace

void export_heatmap_png(const Heatmap& h, const std::string& path, bool color) {
    if (!color) {
        std::vector<double> scaled(h.grid.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = 255.0 * h.grid[i];
        write_png_gray(path, h.side, h.side, quantize(scaled));
        return;
    }
    std::vector<std::uint8_t> rgb;
    rgb.reserve(h.grid.size() * 3);
    for (double v : h.grid) {
        auto px = colormap(v);
        rgb.insert(rgb.end(), px.begin(), px.end());
    }
    write_png_rgb(path, h.side, h.side, rgb);
}

std::string heatmap_csv(const Heatmap& h, const ImageLayout& layout, const ApiRegistry& registry) {
    std::ostringstream os;
    os.precision(8);
    os << "row,col,value,api,centrality\n";
    for (std::size_t r = 0; r < h.side; ++r)
        for (std::size_t c = 0; c < h.side; ++c) {
            os << r << ',' << c << ',' << h.at(r, c) << ',';
            if (auto f = pixel_to_feature(layout, r, c))
                os << registry.at(f->api) << ',' << to_string(f->kind) << '\n';
            else
                os << "PAD,\n";
        }
    return os.str();
}

std::string attribution_csv(const std::vector<AttributionEntry>& a, const ApiRegistry& registry) {
    std::ostringstream os;
    os.precision(8);
    os << "rank,api_index,api,centrality,weight\n";
    for (std::size_t i = 0; i < a.size(); ++i)
        os << i + 1 << ',' << a[i].feature.api << ',' << registry.at(a[i].feature.api) << ','
           << to_string(a[i].feature.kind) << ',' << a[i].weight << '\n';
    return os.str();
}

}  // namespace cgfam
