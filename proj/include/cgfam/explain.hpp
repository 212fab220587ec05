#pragma once

#include "cgfam/callgraph.hpp"
#include "cgfam/imagegen.hpp"
#include "cgfam/nnet/checkpoint.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cgfam {

struct Heatmap {
    std::size_t side = 0;
    std::vector<double> grid;  // side*side, row-major, in [0,1]
    std::uint32_t target = 0;
    std::uint64_t source_digest = 0;

    double at(std::size_t r, std::size_t c) const { return grid.at(r * side + c); }
};

/// Grad-CAM++ over the last residual stage for the target class score.
Heatmap gradcam_pp(const nn::Checkpoint& ck, const FeatureImage& img, std::uint32_t target);

/// Same, with the map computed from given activations A (C x h x w) and
/// gradients G of the class score; exposed for testing.
std::vector<double> gradcam_pp_map(const std::vector<double>& A, const std::vector<double>& G, std::size_t channels,
                                   std::size_t h, std::size_t w);

/// Bilinear resize with half-pixel centres, edges clamped.
std::vector<double> upsample_bilinear(const std::vector<double>& src, std::size_t h, std::size_t w, std::size_t out_h,
                                      std::size_t out_w);

/// Min-max to [0,1]; an all-zero map stays zero, a constant nonzero map becomes ones.
void minmax_normalize(std::vector<double>& v);

struct AttributionEntry {
    FeatureLocation feature;
    std::size_t flat = 0;
    double weight = 0.0;
};

/// Top-k non-pad pixels with positive weight, by weight descending then flat
/// index ascending.
std::vector<AttributionEntry> attribute(const Heatmap& h, const ImageLayout& layout, int top_k);

/// 8-bit PNG, optionally through a blue-to-red colour map.
void export_heatmap_png(const Heatmap& h, const std::string& path, bool color = true);

/// row,col,value,api,centrality for every pixel (api = PAD for padding).
std::string heatmap_csv(const Heatmap& h, const ImageLayout& layout, const ApiRegistry& registry);
std::string attribution_csv(const std::vector<AttributionEntry>& a, const ApiRegistry& registry);

}  // namespace cgfam
