#pragma once

#include "cgfam/callgraph.hpp"
#include "cgfam/common.hpp"
#include "cgfam/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cgfam {

/// Wiring template shared by all variants of one family.
struct FamilySpec {
    std::uint32_t id = 0;
    std::string name;
    std::vector<std::uint32_t> signature_apis;  // registry rows, sorted
    std::size_t scaffold_min = 0;               // user-node count range
    std::size_t scaffold_max = 0;
    std::size_t edges_per_node = 1;             // preferential attachment fan-in
    std::size_t depth_min = 1;                  // scaffold depth of signature callers
    std::size_t depth_max = 1;
    std::size_t callers_min = 1;                // callers per signature API
    std::size_t callers_max = 1;
    std::size_t overlap_budget = 0;

    bool operator==(const FamilySpec&) const = default;
};

struct SynthConfig {
    std::size_t families = 10;
    std::size_t variants = 200;
    std::uint64_t seed = 1;
    double noise_rate = 0.03;          // chance each non-signature API is sprinkled in
    std::size_t signature_size = 6;
    std::size_t overlap_budget = 2;    // max shared signature APIs between two families
    std::size_t scaffold_lo = 40;      // bounds from which family size ranges are drawn
    std::size_t scaffold_hi = 240;
    double other_api_ratio = 0.25;     // non-sensitive library nodes per user node

    std::uint64_t digest() const;
};

std::vector<FamilySpec> gen_family_specs(const SynthConfig& cfg, const ApiRegistry& registry);

/// One variant. `noise_rate` and `other_api_ratio` come from the config.
CallGraph gen_variant(const FamilySpec& spec, const ApiRegistry& registry, const SynthConfig& cfg, Rng& rng);

/// Per-item seed; serial and parallel generation use the same derivation.
std::uint64_t variant_seed(std::uint64_t master, std::uint32_t family, std::size_t index);

struct SynthGraphs {
    std::vector<std::string> families;
    std::vector<CallGraph> graphs;  // family-major
    std::vector<std::uint32_t> labels;
    std::vector<std::uint64_t> seeds;
};

/// Call graphs only, F*V items in family-major order.
SynthGraphs gen_graphs(const SynthConfig& cfg, const ApiRegistry& registry, std::size_t jobs = 1);

/// Featurizes generated graphs; graphs are kept in the dataset.
LabeledDataset featurize_all(SynthGraphs graphs, const ApiRegistry& registry, std::size_t jobs = 1);

LabeledDataset gen_dataset(const SynthConfig& cfg, const ApiRegistry& registry, std::size_t jobs = 1);

/// JSON manifest: config, family specs, per-item names, labels and seeds.
/// Graph and image paths (relative to the manifest) are recorded when given.
std::string dataset_manifest(const SynthConfig& cfg, const std::vector<FamilySpec>& specs, const LabeledDataset& ds,
                             const std::vector<std::string>& graph_paths = {},
                             const std::vector<std::string>& image_paths = {});

}  // namespace cgfam
