#include "cgfam/crossval.hpp"

#include "cgfam/common.hpp"
#include "cgfam/trainer.hpp"

namespace cgfam {

std::vector<std::size_t> stratified_folds(std::span<const std::uint32_t> labels, std::size_t families, std::size_t k,
                                          std::uint64_t seed) {
    if (k < 2) throw UsageError("cross-validation needs k >= 2");
    std::vector<std::vector<std::size_t>> members(families);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= families) throw FormatError("label " + std::to_string(labels[i]) + " outside family list");
        members[labels[i]].push_back(i);
    }
    std::vector<std::size_t> fold(labels.size());
    Rng rng(seed);
    std::size_t offset = 0;
    for (std::size_t f = 0; f < families; ++f) {
        if (members[f].size() < k)
            throw UsageError("family " + std::to_string(f) + " has " + std::to_string(members[f].size()) +
                             " samples, fewer than the " + std::to_string(k) + " folds");
        shuffle(members[f], rng);
        // Rotating the starting fold spreads the remainders across folds.
        for (std::size_t j = 0; j < members[f].size(); ++j) fold[members[f][j]] = (offset + j) % k;
        offset = (offset + members[f].size()) % k;
    }
    return fold;
}

std::vector<FoldSplit> fold_splits(const std::vector<std::size_t>& assignment, std::size_t k) {
    std::vector<FoldSplit> out(k);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        for (std::size_t f = 0; f < k; ++f) (assignment[i] == f ? out[f].test : out[f].train).push_back(i);
    return out;
}

CrossValResult crossvalidate(const LabeledDataset& ds, std::size_t k, std::uint64_t seed, const Pipeline& pipeline,
                             std::size_t jobs) {
    validate(ds);
    const auto labels = ds.labels();
    const auto splits = fold_splits(stratified_folds(labels, ds.families.size(), k, seed), k);
    CrossValResult r;
    for (std::size_t f = 0; f < k; ++f) {
        const auto ck = pipeline(ds.subset(splits[f].train), f);
        r.folds.push_back(evaluate(ck, ds.subset(splits[f].test), jobs));
    }
    r.mean = mean_metrics(r.folds);
    return r;
}

}  // namespace cgfam
