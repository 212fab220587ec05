#include "cgfam/augment.hpp"

#include <algorithm>
#include <cmath>

namespace cgfam {

void AugmentationPolicy::check() const {
    if (!(mask_fraction >= 0.0 && mask_fraction < 1.0)) throw UsageError("mask fraction must lie in [0,1)");
    if (!(jitter_lo > 0.0 && jitter_lo <= jitter_hi)) throw UsageError("jitter range must satisfy 0 < lo <= hi");
}

std::uint64_t AugmentationPolicy::digest() const {
    Digest d;
    d.u64(static_cast<std::uint64_t>(mode)).f64(mask_fraction).f64(jitter_lo).f64(jitter_hi);
    for (const auto& t : graph_transforms) d.str(to_string(t));
    return d.value();
}

std::vector<double> augment_pixels(const std::vector<double>& pixels, const AugmentationPolicy& policy, Rng& rng) {
    std::vector<double> out = pixels;
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] != 0.0) nonzero.push_back(i);
    const auto masked = static_cast<std::size_t>(std::floor(policy.mask_fraction * static_cast<double>(nonzero.size())));
    // Partial Fisher-Yates: the first `masked` slots are a uniform sample.
    for (std::size_t k = 0; k < masked; ++k) {
        const auto j = k + uniform_index(rng, nonzero.size() - k);
        std::swap(nonzero[k], nonzero[j]);
        out[nonzero[k]] = 0.0;
    }
    if (policy.jitter_lo != 1.0 || policy.jitter_hi != 1.0) {
        for (auto& v : out) {
            if (v == 0.0) continue;
            v = std::clamp(v * uniform(rng, policy.jitter_lo, policy.jitter_hi), 0.0, 255.0);
        }
    }
    return out;
}

ViewBatch make_views(const LabeledDataset& ds, const std::vector<std::size_t>& indices,
                     const AugmentationPolicy& policy, Rng& rng, const ApiRegistry* registry) {
    if (policy.mode == AugmentMode::graph && (!ds.has_graphs() || registry == nullptr))
        throw UsageError("graph-level augmentation needs the source call graphs and their registry");
    ViewBatch vb;
    for (int copy = 0; copy < 2; ++copy) {
        for (auto i : indices) {
            const auto& s = ds.samples.at(i);
            if (policy.mode == AugmentMode::pixel) {
                auto v = augment_pixels(s.image.pixels, policy, rng);
                vb.pixels.insert(vb.pixels.end(), v.begin(), v.end());
            } else {
                const auto seed = rng();
                Transform t;
                if (!policy.graph_transforms.empty())
                    t = policy.graph_transforms[uniform_index(rng, policy.graph_transforms.size())];
                const auto img = featurize(apply(t, ds.graphs[i], *registry, seed), *registry);
                vb.pixels.insert(vb.pixels.end(), img.pixels.begin(), img.pixels.end());
            }
            vb.labels.push_back(s.label);
        }
    }
    return vb;
}

}  // namespace cgfam
