#pragma once

#include "cgfam/common.hpp"
#include "cgfam/dataset.hpp"
#include "cgfam/obfusim.hpp"

#include <cstdint>
#include <vector>

namespace cgfam {

enum class AugmentMode { pixel, graph };

struct AugmentationPolicy {
    AugmentMode mode = AugmentMode::pixel;
    double mask_fraction = 0.1;  // share of nonzero pixels zeroed
    double jitter_lo = 0.9;      // per-pixel multiplicative factor range
    double jitter_hi = 1.1;
    /// Graph mode: each view draws one of these uniformly (empty = identity).
    std::vector<Transform> graph_transforms;

    void check() const;
    std::uint64_t digest() const;
};

/// Mask then jitter; values stay in [0,255].
std::vector<double> augment_pixels(const std::vector<double>& pixels, const AugmentationPolicy& policy, Rng& rng);

struct ViewBatch {
    std::vector<double> pixels;         // 2N x side*side, first copy then second
    std::vector<std::uint32_t> labels;  // 2N
};

/// Two independently augmented copies of ds[indices], concatenated. Graph mode
/// needs ds.graphs and the registry the graphs were built with.
ViewBatch make_views(const LabeledDataset& ds, const std::vector<std::size_t>& indices,
                     const AugmentationPolicy& policy, Rng& rng, const ApiRegistry* registry = nullptr);

}  // namespace cgfam
