#pragma once

#include "cgfam/dataset.hpp"
#include "cgfam/metrics.hpp"
#include "cgfam/nnet/checkpoint.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cgfam {

/// Fold index per sample. Each family's samples are shuffled and dealt
/// round-robin, so fold sizes per family differ by at most one. Throws
/// UsageError when a family has fewer than k samples.
std::vector<std::size_t> stratified_folds(std::span<const std::uint32_t> labels, std::size_t families, std::size_t k,
                                          std::uint64_t seed);

struct FoldSplit {
    std::vector<std::size_t> train, test;
};

std::vector<FoldSplit> fold_splits(const std::vector<std::size_t>& assignment, std::size_t k);

/// Trains a classifier-bearing checkpoint on the training part of a fold.
using Pipeline = std::function<nn::Checkpoint(const LabeledDataset& train, std::size_t fold)>;

struct CrossValResult {
    std::vector<Metrics> folds;
    Metrics mean;
};

CrossValResult crossvalidate(const LabeledDataset& ds, std::size_t k, std::uint64_t seed, const Pipeline& pipeline,
                             std::size_t jobs = 1);

}  // namespace cgfam
