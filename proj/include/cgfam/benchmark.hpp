#pragma once

#include "cgfam/augment.hpp"
#include "cgfam/crossval.hpp"
#include "cgfam/report.hpp"
#include "cgfam/synth.hpp"
#include "cgfam/trainer.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cgfam {

struct BenchmarkConfig {
    SynthConfig synth;
    std::size_t folds = 10;
    SupConConfig encoder;     // contrastive stage, or the joint model when !contrastive
    SupConConfig classifier;  // linear head on frozen embeddings
    AugmentationPolicy policy;
    std::optional<nn::EncoderConfig> network;  // default: standard(side)
    bool contrastive = true;
    /// With contrastive on, also train the cross-entropy-only model on the
    /// robustness fold so each robustness row has both columns.
    bool ablation = true;
    std::size_t robustness_fold = 0;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::function<void(const std::string&)> progress;

    /// Desk-scale defaults: 10 encoder epochs, 100 classifier epochs.
    static BenchmarkConfig desk(std::uint64_t seed);
    std::uint64_t digest() const;
};

struct RobustnessRow {
    std::string group, name, transform;
    std::optional<Metrics> with_contrastive, without_contrastive;
};

struct BenchmarkResult {
    std::vector<std::string> families;
    std::uint64_t dataset_digest = 0;
    CrossValResult cv;
    std::vector<RobustnessRow> robustness;  // first row is the untransformed test fold
    std::vector<std::vector<double>> heatmap_ssim;
    double within_ssim = 0.0, between_ssim = 0.0;
    RunReport report;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const ApiRegistry& registry);

std::string folds_csv(const CrossValResult& cv);
std::string robustness_csv(const std::vector<RobustnessRow>& rows);

}  // namespace cgfam
