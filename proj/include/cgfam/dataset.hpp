#pragma once

#include "cgfam/callgraph.hpp"
#include "cgfam/imagegen.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cgfam {

struct Sample {
    FeatureImage image;
    std::uint32_t label = 0;
    std::string name;
    std::uint64_t seed = 0;  // generator seed, 0 if not synthetic
};

/// Labeled feature images. `graphs` is either empty or parallel to `samples`
/// (kept when a caller needs to re-featurize through graph transforms).
struct LabeledDataset {
    std::vector<std::string> families;
    std::vector<Sample> samples;
    std::vector<CallGraph> graphs;
    std::uint64_t registry_hash = 0;

    std::size_t size() const noexcept { return samples.size(); }
    bool has_graphs() const noexcept { return !graphs.empty(); }
    std::vector<std::uint32_t> labels() const;
    LabeledDataset subset(const std::vector<std::size_t>& indices) const;
    /// Digest over families, labels and image digests.
    std::uint64_t digest() const;
};

/// Checks label range, image shapes and registry hashes; throws FormatError
/// or HashMismatchError.
void validate(const LabeledDataset& ds);

/// Loads a dataset manifest: `families` (names or {name}) and `items`, each
/// with `family` (name) or `label` (index) and a `graph` and/or `image` path
/// relative to the manifest. Items with only a graph are featurized; cached
/// images are checked against the registry. Graphs are kept if requested and
/// every item has one.
LabeledDataset load_dataset(const std::string& manifest_path, const ApiRegistry& registry, bool keep_graphs = false,
                            std::size_t jobs = 1);

}  // namespace cgfam
